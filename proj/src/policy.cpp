#include "lgc/policy.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lgc {

void validate(const LearnerConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("learner config: " + what);
  };
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) fail("alpha must be in (0,1]");
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) fail("gamma must be in (0,1]");
  if (!(cfg.epsilon_start >= 0.0 && cfg.epsilon_start <= 1.0)) {
    fail("epsilon_start must be in [0,1]");
  }
  if (!(cfg.epsilon_min >= 0.0 && cfg.epsilon_min <= cfg.epsilon_start)) {
    fail("epsilon_min must be in [0, epsilon_start]");
  }
  if (!(cfg.epsilon_decay > 0.0 && cfg.epsilon_decay <= 1.0)) {
    fail("epsilon_decay must be in (0,1]");
  }
  if (!(cfg.prior_collect_prob >= 0.0 && cfg.prior_collect_prob <= 1.0)) {
    fail("prior_collect_prob must be in [0,1]");
  }
  if (cfg.shaping_kappa < 0.0) fail("shaping_kappa must be >= 0");
  if (cfg.threshold_penalty < 0.0) fail("threshold_penalty must be >= 0");
}

double QTable::value(const GcState& s, GcAction a) const {
  auto it = rows_.find(key(s));
  if (it == rows_.end()) return 0.0;
  return it->second[static_cast<std::size_t>(a.index())];
}

void QTable::set(const GcState& s, GcAction a, double v) {
  row(s)[static_cast<std::size_t>(a.index())] = v;
}

std::vector<double>& QTable::row(const GcState& s) {
  auto [it, inserted] = rows_.try_emplace(key(s));
  if (inserted) it->second.assign(static_cast<std::size_t>(num_actions_), 0.0);
  return it->second;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

void QTable::export_csv(std::ostream& out) const {
  // ordered by (site, mem_bin, action) for stable snapshots
  std::map<std::uint64_t, const std::vector<double>*> ordered;
  for (const auto& [k, row] : rows_) ordered.emplace(k, &row);
  std::string text = "site,mem_bin,action,q_value\n";
  for (const auto& [k, row] : ordered) {
    const auto site = static_cast<SiteId>(k >> 20);
    const auto bin = static_cast<std::uint32_t>(k & 0xfffff);
    for (int i = 0; i < num_actions_; ++i) {
      const GcAction a = i == 0 ? GcAction::nothing() : GcAction::collect(i);
      text += std::to_string(site);
      text += ',';
      text += std::to_string(bin);
      text += ',';
      text += action_name(a);
      text += ',';
      append_double(text, (*row)[static_cast<std::size_t>(i)]);
      text += '\n';
    }
  }
  out << text;
}

QTable QTable::import_csv(std::istream& in, int num_actions) {
  QTable table(num_actions);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string site_s, bin_s, action_s, value_s;
    if (!std::getline(fields, site_s, ',') ||
        !std::getline(fields, bin_s, ',') ||
        !std::getline(fields, action_s, ',') ||
        !std::getline(fields, value_s)) {
      throw std::invalid_argument("policy csv: malformed line: " + line);
    }
    GcState s;
    s.site = static_cast<SiteId>(std::stoul(site_s));
    s.mem_bin = static_cast<std::uint32_t>(std::stoul(bin_s));
    GcAction a = GcAction::nothing();
    if (action_s != "nothing") {
      if (action_s.size() < 3 || action_s.substr(0, 2) != "cg") {
        throw std::invalid_argument("policy csv: unknown action " + action_s);
      }
      a = GcAction::collect(std::stoi(action_s.substr(2)));
    }
    if (a.index() >= num_actions) {
      throw std::invalid_argument("policy csv: action out of range: " + line);
    }
    double v = 0.0;
    auto res =
        std::from_chars(value_s.data(), value_s.data() + value_s.size(), v);
    if (res.ec != std::errc()) {
      throw std::invalid_argument("policy csv: bad value: " + value_s);
    }
    table.set(s, a, v);
  }
  return table;
}

Learner::Learner(const LearnerConfig& cfg, const MemoryConfig& mem,
                 int num_generations)
    : cfg_(cfg),
      mem_(mem),
      num_generations_(num_generations),
      actions_(action_set(num_generations)),
      table_(num_generations + 1),
      epsilon_(cfg.epsilon_start) {
  validate(cfg);
}

void Learner::ensure_initialized(const GcState& s) {
  if (!cfg_.enable_init) return;
  if (s.mem_bin != mem_.num_bins) return;
  if (table_.has_row(s)) return;  // idempotent: only untouched states
  std::vector<double>& row = table_.row(s);
  for (int i = 0; i < num_generations_; ++i) {
    row[static_cast<std::size_t>(i)] = cfg_.penalty_init;
  }
  // the full-collection cell stays at zero
}

std::pair<GcAction, double> Learner::opt_action(const GcState& s) {
  ensure_initialized(s);
  GcAction best = actions_.front();
  double best_value = table_.value(s, best);
  for (std::size_t i = 1; i < actions_.size(); ++i) {
    const double v = table_.value(s, actions_[i]);
    if (v > best_value) {
      best = actions_[i];
      best_value = v;
    }
  }
  return {best, best_value};
}

GcAction Learner::select_action(const GcState& s, Rng& rng) {
  if (rng.uniform() < epsilon_) {
    if (cfg_.enable_prior) {
      if (rng.uniform() < cfg_.prior_collect_prob) {
        const int g = 1 + static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(num_generations_)));
        return GcAction::collect(g);
      }
      return GcAction::nothing();
    }
    const auto idx = rng.uniform_int(actions_.size());
    return actions_[idx];
  }
  return opt_action(s).first;
}

void Learner::record_transition(const GcState& s, GcAction a,
                                Ticks collection_cost, bool forced_full) {
  if (!buffer_.empty() && !buffer_.back().next_state.has_value()) {
    buffer_.back().next_state = s;
  }
  TransitionRecord rec;
  rec.state = s;
  rec.action = a;
  rec.collection_cost = collection_cost;
  rec.forced_full = forced_full;
  buffer_.push_back(rec);
}

UpdateSummary Learner::apply_reward(double reward, Ticks epoch_ticks) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument(
        "apply_reward: reward outside [0,1]; caller must normalize");
  }
  UpdateSummary summary;
  summary.epsilon_used = epsilon_;
  // everything but the trailing pending record is complete
  std::size_t complete = buffer_.size();
  if (complete > 0 && !buffer_.back().next_state.has_value()) --complete;
  for (std::size_t i = 0; i < complete; ++i) {
    const TransitionRecord& rec = buffer_[i];
    double r = reward;
    if (cfg_.enable_shaping && rec.action.collects()) {
      r -= cfg_.shaping_kappa * static_cast<double>(rec.collection_cost) /
           static_cast<double>(epoch_ticks);
    }
    if (rec.forced_full) r -= cfg_.threshold_penalty;
    if (r < -1.0) r = -1.0;
    ensure_initialized(rec.state);
    ensure_initialized(*rec.next_state);
    const double q = table_.value(rec.state, rec.action);
    const double max_next = opt_action(*rec.next_state).second;
    table_.set(rec.state, rec.action,
               q + cfg_.alpha * (r + cfg_.gamma * max_next - q));
    ++summary.transitions_applied;
  }
  buffer_.erase(buffer_.begin(),
                buffer_.begin() + static_cast<std::ptrdiff_t>(complete));
  epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
  return summary;
}

GcAction BaselineGc::decide(int num_generations) {
  if (net_allocations_ < t0_) return GcAction::nothing();
  net_allocations_ = 0;
  if (++young_triggers_ < t1_) {
    return GcAction::collect(1);
  }
  young_triggers_ = 0;
  if (++mid_triggers_ < t2_) {
    return GcAction::collect(std::min(2, num_generations));
  }
  mid_triggers_ = 0;
  return GcAction::collect(num_generations);
}

}  // namespace lgc
