#include "pbo/pandora.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "pbo/math_util.hpp"
#include "pbo/root_finding.hpp"

namespace pbo {

void PandoraInstance::validate() const {
  if (boxes.empty()) throw std::invalid_argument("PandoraInstance: at least one box required");
  for (const PandoraBox& b : boxes) b.validate();
  if (budget) {
    if (!(min_cost() < *budget && *budget < total_cost()))
      throw std::invalid_argument("PandoraInstance: budget must satisfy min cost < B < total cost");
  }
}

double PandoraInstance::min_cost() const {
  double m = std::numeric_limits<double>::infinity();
  for (const PandoraBox& b : boxes) m = std::min(m, b.cost);
  return m;
}

double PandoraInstance::total_cost() const {
  double t = 0.0;
  for (const PandoraBox& b : boxes) t += b.cost;
  return t;
}

bool PandoraInstance::all_finite_support() const {
  for (const PandoraBox& b : boxes)
    if (b.reward.is_gaussian()) return false;
  return true;
}

double gittins_index(const RewardDistribution& reward, double cost) {
  if (!(cost > 0.0)) throw std::invalid_argument("gittins_index: cost must be positive");

  double root;
  if (reward.is_gaussian()) {
    const double mu = reward.gaussian_mean();
    const double sigma = reward.gaussian_std();
    root = bisect_decreasing([&](double g) { return reward.expected_improvement(g) - cost; },
                             mu - sigma, mu + sigma);
  } else {
    const double lo = reward.support_min();
    if (cost >= reward.expected_improvement(lo)) {
      // Root below the support: EI(y) = E f - y there.
      root = reward.mean() - cost;
    } else {
      root = bisect_decreasing([&](double g) { return reward.expected_improvement(g) - cost; },
                               lo - 1.0, reward.support_max());
    }
  }

  const double residual = std::abs(reward.expected_improvement(root) - cost);
  if (residual > 1e-10 * (1.0 + cost))
    throw NumericalError("gittins_index: root residual above tolerance");
  return root;
}

double gittins_index(const PandoraBox& box) { return gittins_index(box.reward, box.cost); }

PolicyTrace run_gittins_policy(const PandoraInstance& instance, TieRule tie_rule, std::mt19937_64& rng) {
  instance.validate();
  const std::size_t n = instance.boxes.size();

  std::vector<double> index(n);
  for (std::size_t j = 0; j < n; ++j) index[j] = gittins_index(instance.boxes[j]);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (index[a] != index[b]) return index[a] > index[b];
    return instance.boxes[a].id < instance.boxes[b].id;
  });

  PolicyTrace trace;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < n; ++step) {
    const PandoraBox& box = instance.boxes[order[step]];
    if (step > 0) {
      const bool stop = tie_rule == TieRule::stop_early ? best >= index[order[step]]
                                                        : best > index[order[step]];
      if (stop) break;
    }
    double reward;
    if (box.reward.is_gaussian()) {
      std::normal_distribution<double> normal(box.reward.gaussian_mean(), box.reward.gaussian_std());
      reward = normal(rng);
    } else {
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      double u = uniform(rng);
      reward = box.reward.atoms().back().value;
      for (const Atom& a : box.reward.atoms()) {
        if (u < a.probability) {
          reward = a.value;
          break;
        }
        u -= a.probability;
      }
    }
    trace.opened_ids.push_back(box.id);
    trace.realized_rewards.push_back(reward);
    trace.total_cost += box.cost;
    best = std::max(best, reward);
  }
  trace.terminal_reward = best;
  trace.stopping_step = static_cast<int>(trace.opened_ids.size());
  return trace;
}

namespace {

void require_finite(const PandoraInstance& instance, const char* who) {
  if (!instance.all_finite_support())
    throw UnsupportedError(std::string(who) + ": Gaussian rewards are unsupported for exact evaluation");
}

}  // namespace

PolicyOutcome evaluate_policy(const PandoraInstance& instance, const ThresholdPolicy& policy,
                              double cost_scale) {
  instance.validate();
  require_finite(instance, "evaluate_policy");
  if (policy.order.empty()) throw std::invalid_argument("evaluate_policy: at least one box must be opened");
  if (policy.thresholds.size() != policy.order.size())
    throw std::invalid_argument("evaluate_policy: thresholds must match order length");

  // Odometer over the atom combinations of the boxes actually in the order.
  const std::size_t m = policy.order.size();
  std::vector<std::size_t> digit(m, 0);
  PolicyOutcome out;
  while (true) {
    double prob = 1.0;
    double best = -std::numeric_limits<double>::infinity();
    double spend = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const PandoraBox& box = instance.boxes[policy.order[k]];
      if (k > 0) {
        const bool stop = policy.strict ? best > policy.thresholds[k] : best >= policy.thresholds[k];
        if (stop) {
          // Realizations of unopened boxes are marginalized out; count this
          // truncated trajectory once (all later digits at zero).
          for (std::size_t r = k; r < m; ++r)
            if (digit[r] != 0) prob = 0.0;
          break;
        }
      }
      const Atom& atom = box.reward.atoms()[digit[k]];
      prob *= atom.probability;
      spend += box.cost;
      best = std::max(best, atom.value);
    }
    if (prob > 0.0) {
      out.expected_terminal += prob * best;
      out.expected_spend += prob * spend;
      out.net_value += prob * (best - cost_scale * spend);
    }
    // advance odometer
    std::size_t k = 0;
    while (k < m) {
      if (++digit[k] < instance.boxes[policy.order[k]].reward.atoms().size()) break;
      digit[k] = 0;
      ++k;
    }
    if (k == m) break;
  }
  return out;
}

double policy_value(const PandoraInstance& instance, const ThresholdPolicy& policy) {
  return evaluate_policy(instance, policy).net_value;
}

ThresholdPolicy gittins_threshold_policy(const PandoraInstance& instance, TieRule tie_rule,
                                         double cost_scale, double tie_tol) {
  instance.validate();
  const std::size_t n = instance.boxes.size();
  std::vector<double> index(n);
  for (std::size_t j = 0; j < n; ++j)
    index[j] = gittins_index(instance.boxes[j].reward, cost_scale * instance.boxes[j].cost);

  std::vector<int> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (index[a] != index[b]) return index[a] > index[b];
    return instance.boxes[a].id < instance.boxes[b].id;
  });

  // Chain boxes whose indices agree within tolerance into tie groups and
  // order each group by the least-expected-cost rule.
  ThresholdPolicy policy;
  policy.strict = tie_rule == TieRule::open_on_tie;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    const double head = index[order[start]];
    const double tol = tie_tol * (1.0 + std::abs(head));
    while (end < n && std::abs(index[order[end]] - index[order[end - 1]]) <= tol) ++end;
    if (end - start > 1) {
      std::sort(order.begin() + start, order.begin() + end, [&](int a, int b) {
        const auto& ba = instance.boxes[a];
        const auto& bb = instance.boxes[b];
        const double pa = policy.strict ? ba.reward.prob_greater(head, tol) : ba.reward.prob_geq(head, tol);
        const double pb = policy.strict ? bb.reward.prob_greater(head, tol) : bb.reward.prob_geq(head, tol);
        const double ra = pa > 0.0 ? ba.cost / pa : std::numeric_limits<double>::infinity();
        const double rb = pb > 0.0 ? bb.cost / pb : std::numeric_limits<double>::infinity();
        if (ra != rb) return policy.strict ? ra > rb : ra < rb;
        return ba.id < bb.id;
      });
    }
    start = end;
  }

  policy.order = order;
  policy.thresholds.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tol = tie_tol * (1.0 + std::abs(index[order[k]]));
    policy.thresholds[k] = policy.strict ? index[order[k]] + tol : index[order[k]] - tol;
  }
  return policy;
}

PolicyOutcome evaluate_gittins_policy(const PandoraInstance& instance, TieRule tie_rule,
                                      double cost_scale, double tie_tol) {
  return evaluate_policy(instance, gittins_threshold_policy(instance, tie_rule, cost_scale, tie_tol),
                         cost_scale);
}

namespace {

struct BruteForceSolver {
  const PandoraInstance& instance;
  double cost_scale;
  std::vector<double> atoms;                 // sorted unique atom values
  std::vector<std::vector<int>> atom_index;  // per box, per atom, index into atoms
  std::vector<double> memo;
  std::vector<bool> known;
  std::size_t n_best;

  explicit BruteForceSolver(const PandoraInstance& inst, double scale)
      : instance(inst), cost_scale(scale) {
    for (const PandoraBox& b : inst.boxes)
      for (const Atom& a : b.reward.atoms()) atoms.push_back(a.value);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    atom_index.resize(inst.boxes.size());
    for (std::size_t j = 0; j < inst.boxes.size(); ++j)
      for (const Atom& a : inst.boxes[j].reward.atoms())
        atom_index[j].push_back(static_cast<int>(
            std::lower_bound(atoms.begin(), atoms.end(), a.value) - atoms.begin()));
    n_best = atoms.size() + 1;  // slot 0: nothing opened yet
    memo.assign((std::size_t{1} << inst.boxes.size()) * n_best, 0.0);
    known.assign(memo.size(), false);
  }

  double value(std::uint32_t mask, int best_slot) {
    const std::size_t key = mask * n_best + best_slot;
    if (known[key]) return memo[key];
    double best_action = -std::numeric_limits<double>::infinity();
    if (best_slot > 0) best_action = atoms[best_slot - 1];  // stop and take the incumbent
    for (std::size_t j = 0; j < instance.boxes.size(); ++j) {
      if (mask & (1u << j)) continue;
      const PandoraBox& box = instance.boxes[j];
      double ev = -cost_scale * box.cost;
      const auto& box_atoms = box.reward.atoms();
      for (std::size_t a = 0; a < box_atoms.size(); ++a) {
        const int slot = std::max(best_slot, atom_index[j][a] + 1);
        ev += box_atoms[a].probability * value(mask | (1u << j), slot);
      }
      best_action = std::max(best_action, ev);
    }
    known[key] = true;
    memo[key] = best_action;
    return best_action;
  }
};

}  // namespace

double brute_force_value_scaled(const PandoraInstance& instance, double cost_scale) {
  instance.validate();
  require_finite(instance, "brute_force_value");
  if (instance.boxes.size() > 6)
    throw std::invalid_argument("brute_force_value: at most 6 boxes supported");
  for (const PandoraBox& b : instance.boxes)
    if (b.reward.atoms().size() > 4)
      throw std::invalid_argument("brute_force_value: at most 4 atoms per box supported");
  BruteForceSolver solver(instance, cost_scale);
  return solver.value(0, 0);
}

double brute_force_value(const PandoraInstance& instance) {
  return brute_force_value_scaled(instance, 1.0);
}

double lagrangian_value(const PandoraInstance& instance, double lambda) {
  if (!instance.budget) throw std::invalid_argument("lagrangian_value: instance has no budget");
  if (lambda < 0.0) throw std::invalid_argument("lagrangian_value: lambda must be nonnegative");
  return brute_force_value_scaled(instance, lambda) + lambda * *instance.budget;
}

MixedBudgetPolicy budget_lambda(const PandoraInstance& instance, double budget) {
  instance.validate();
  require_finite(instance, "budget_lambda");
  if (!(instance.min_cost() < budget && budget < instance.total_cost()))
    throw std::invalid_argument("budget_lambda: constraint inactive (need min cost < B < total cost)");

  const auto dual = [&](double lambda) {
    return brute_force_value_scaled(instance, lambda) + lambda * budget;
  };

  double lambda_hi = 1.0;
  int guard = 0;
  while (dual(2.0 * lambda_hi) <= dual(lambda_hi)) {
    lambda_hi *= 2.0;
    if (++guard > 60) throw NumericalError("budget_lambda: dual objective does not turn increasing");
  }
  const double lambda_lo = 1e-6;
  const double lambda_star = golden_section_min(dual, lambda_lo, 2.0 * lambda_hi, 1e-10);

  // Near-degenerate index ties at lambda* are detected with a relative
  // tolerance; this also covers the lambda -> 0 edge where index gaps
  // shrink with lambda itself.
  const double tie_tol = 1e-5;
  const PolicyOutcome minus = evaluate_gittins_policy(instance, TieRule::stop_early, lambda_star, tie_tol);
  const PolicyOutcome plus = evaluate_gittins_policy(instance, TieRule::open_on_tie, lambda_star, tie_tol);

  MixedBudgetPolicy mixed;
  mixed.lambda_star = lambda_star;
  mixed.spend_minus = minus.expected_spend;
  mixed.spend_plus = plus.expected_spend;
  mixed.lagrangian_min = dual(lambda_star);

  if (minus.expected_spend > budget + 1e-7 || plus.expected_spend < budget - 1e-7)
    throw NumericalError("budget_lambda: policy spends do not bracket the budget");

  if (plus.expected_spend - minus.expected_spend < 1e-12) {
    mixed.alpha = 1.0;
  } else {
    mixed.alpha = (plus.expected_spend - budget) / (plus.expected_spend - minus.expected_spend);
    mixed.alpha = std::clamp(mixed.alpha, 0.0, 1.0);
  }
  mixed.expected_spend = mixed.alpha * minus.expected_spend + (1.0 - mixed.alpha) * plus.expected_spend;
  mixed.expected_value = mixed.alpha * minus.expected_terminal + (1.0 - mixed.alpha) * plus.expected_terminal;
  return mixed;
}

void save_instance(std::ostream& out, const PandoraInstance& instance) {
  out.precision(17);
  out << "boxes " << instance.boxes.size() << "\n";
  for (const PandoraBox& b : instance.boxes) {
    out << "box " << b.id << " cost " << b.cost << " ";
    if (b.reward.is_gaussian()) {
      out << "gaussian " << b.reward.gaussian_mean() << " " << b.reward.gaussian_std() << "\n";
    } else {
      out << "finite " << b.reward.atoms().size();
      for (const Atom& a : b.reward.atoms()) out << " " << a.value << " " << a.probability;
      out << "\n";
    }
  }
  if (instance.budget) out << "budget " << *instance.budget << "\n";
}

PandoraInstance load_instance(std::istream& in) {
  PandoraInstance instance;
  std::string token;
  std::size_t n_boxes = 0;
  if (!(in >> token) || token != "boxes" || !(in >> n_boxes))
    throw std::invalid_argument("load_instance: expected 'boxes <count>'");
  for (std::size_t i = 0; i < n_boxes; ++i) {
    PandoraBox box;
    std::string kind;
    if (!(in >> token) || token != "box" || !(in >> box.id >> token) || token != "cost" ||
        !(in >> box.cost >> kind))
      throw std::invalid_argument("load_instance: malformed box line");
    if (kind == "gaussian") {
      double mean, std;
      if (!(in >> mean >> std)) throw std::invalid_argument("load_instance: malformed gaussian");
      box.reward = RewardDistribution::gaussian(mean, std);
    } else if (kind == "finite") {
      std::size_t k;
      if (!(in >> k)) throw std::invalid_argument("load_instance: malformed finite support");
      std::vector<Atom> atoms(k);
      for (Atom& a : atoms)
        if (!(in >> a.value >> a.probability))
          throw std::invalid_argument("load_instance: malformed atom");
      box.reward = RewardDistribution::finite(std::move(atoms));
    } else {
      throw std::invalid_argument("load_instance: unknown distribution tag '" + kind + "'");
    }
    instance.boxes.push_back(std::move(box));
  }
  if (in >> token) {
    if (token != "budget") throw std::invalid_argument("load_instance: unexpected trailing token");
    double b;
    if (!(in >> b)) throw std::invalid_argument("load_instance: malformed budget");
    instance.budget = b;
  }
  instance.validate();
  return instance;
}

}  // namespace pbo
