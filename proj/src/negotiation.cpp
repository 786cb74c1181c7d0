// Copyright 2026 The Infoseek Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infoseek/negotiation.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "infoseek/errors.hpp"

namespace infoseek {
namespace {

constexpr const char* kPropose = "propose";
constexpr const char* kAgree = "agree";
constexpr const char* kYou = "<you>";
constexpr const char* kThem = "<them>";

std::string digit(int n) { return std::to_string(n); }

int total_items(const ItemCounts& c) { return std::accumulate(c.begin(), c.end(), 0); }

int worth(const ItemCounts& items, const ItemCounts& values) {
  int s = 0;
  for (int i = 0; i < kItemTypes; ++i) s += items[i] * values[i];
  return s;
}

// Per-type upper bound on a value given the count, so that the proposal box
// for values depends on the counts only.
int value_cap(int count) { return kValueTotal / count; }

int box_size(const ItemCounts& counts) {
  int s = 1;
  for (int c : counts) s *= value_cap(c) + 1;
  return s;
}

constexpr int kMaxCount = kMaxItems - (kItemTypes - 1);

int max_box_size() {
  static const int cached = [] {
    int best = 0;
    for (int a = 1; a <= kMaxCount; ++a)
      for (int b = 1; b <= kMaxCount; ++b)
        for (int c = 1; c <= kMaxCount; ++c) {
          const ItemCounts k{a, b, c};
          const int t = total_items(k);
          if (t >= kMinItems && t <= kMaxItems) best = std::max(best, box_size(k));
        }
    return best;
  }();
  return cached;
}

ItemCounts parse_triple(const std::string& s) {
  ItemCounts out{};
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= kItemTypes) throw LoadError("setup: more than three entries in '" + s + "'");
    try {
      std::size_t used = 0;
      out[i] = std::stoi(item, &used);
      if (used != item.size()) throw LoadError("setup: bad integer '" + item + "'");
    } catch (const std::logic_error&) {
      throw LoadError("setup: bad integer '" + item + "'");
    }
    ++i;
  }
  if (i != kItemTypes) throw LoadError("setup: expected three entries in '" + s + "'");
  return out;
}

}  // namespace

std::vector<std::string> setup_violations(const NegotiationSetup& s) {
  std::vector<std::string> v;
  const int total = total_items(s.counts);
  if (total < kMinItems || total > kMaxItems) v.push_back("total items outside [5, 7]");
  for (int i = 0; i < kItemTypes; ++i) {
    if (s.counts[i] < 1) v.push_back(std::string(kItemNames[i]) + " count below 1");
    if (s.values_a[i] < 0 || s.values_b[i] < 0) v.push_back("negative value");
  }
  if (worth(s.counts, s.values_a) != kValueTotal) v.push_back("agent A values do not sum to 10");
  if (worth(s.counts, s.values_b) != kValueTotal) v.push_back("agent B values do not sum to 10");
  bool shared = false;
  for (int i = 0; i < kItemTypes; ++i) {
    if (s.values_a[i] == 0 && s.values_b[i] == 0) {
      v.push_back(std::string(kItemNames[i]) + " is worthless to both agents");
    }
    shared = shared || (s.values_a[i] > 0 && s.values_b[i] > 0);
  }
  if (!shared) v.push_back("no item type is valued by both agents");
  return v;
}

NegotiationSetup sample_values(Rng& rng) {
  // Proposal: counts uniform on [1, kMaxCount]^3, then each agent's values
  // uniform on the count-dependent box prod [0, 10 / c_i]. Accepting with
  // probability box^2 / max_box^2 flattens the proposal density, so the
  // accepted setups are uniform over the constraint set.
  const double max_box = max_box_size();
  for (;;) {
    NegotiationSetup s;
    for (auto& c : s.counts) c = 1 + static_cast<int>(uniform_index(rng, kMaxCount));
    const int total = total_items(s.counts);
    if (total < kMinItems || total > kMaxItems) continue;
    for (int i = 0; i < kItemTypes; ++i) {
      s.values_a[i] = static_cast<int>(uniform_index(rng, value_cap(s.counts[i]) + 1));
    }
    for (int i = 0; i < kItemTypes; ++i) {
      s.values_b[i] = static_cast<int>(uniform_index(rng, value_cap(s.counts[i]) + 1));
    }
    const double box = box_size(s.counts);
    if (uniform01(rng) >= (box * box) / (max_box * max_box)) continue;
    if (is_valid_setup(s)) return s;
  }
}

NegotiationState NegotiationState::initial(Agent first, int max_turns) {
  if (max_turns < 1) throw ConfigError("negotiation: max_turns must be >= 1");
  NegotiationState s;
  s.to_act = first;
  s.max_turns = max_turns;
  return s;
}

Vocabulary negotiation_vocabulary() {
  std::vector<std::string> tokens{std::string(kStopToken), std::string(kStopDialogueToken),
                                  kPropose, kAgree};
  for (const char* item : kItemNames) tokens.emplace_back(item);
  for (int n = 0; n <= kValueTotal; ++n) tokens.push_back(digit(n));
  tokens.emplace_back(kYou);
  tokens.emplace_back(kThem);
  return Vocabulary(std::move(tokens));
}

std::vector<TokenId> utterance_tokens(const Vocabulary& vocab, const Action& action) {
  switch (action.kind) {
    case Action::Kind::kPropose: {
      std::vector<TokenId> t{vocab.id(kPropose)};
      for (int i = 0; i < kItemTypes; ++i) {
        t.push_back(vocab.id(kItemNames[i]));
        t.push_back(vocab.id(digit(action.take[i])));
      }
      return t;
    }
    case Action::Kind::kAgree: return {vocab.id(kAgree)};
    case Action::Kind::kEndDialogue: return {vocab.stop_dialogue()};
    case Action::Kind::kInvalid: return {vocab.stop()};
  }
  return {};
}

Action parse_utterance(std::span<const TokenId> tokens, const Vocabulary& vocab,
                       const NegotiationSetup& setup, const NegotiationState& state,
                       Agent speaker) {
  if (!tokens.empty() && tokens.back() == vocab.stop()) tokens = tokens.first(tokens.size() - 1);
  if (tokens.size() == 1) {
    if (tokens[0] == vocab.stop_dialogue()) return Action::end_dialogue();
    if (vocab.token(tokens[0]) == kAgree) {
      return state.can_agree(speaker) ? Action::agree() : Action::invalid();
    }
    return Action::invalid();
  }
  if (tokens.size() != static_cast<std::size_t>(kProposalLength)) return Action::invalid();
  if (vocab.token(tokens[0]) != kPropose) return Action::invalid();
  ItemCounts take{};
  for (int i = 0; i < kItemTypes; ++i) {
    if (vocab.token(tokens[1 + 2 * i]) != kItemNames[i]) return Action::invalid();
    const std::string& word = vocab.token(tokens[2 + 2 * i]);
    int n = -1;
    for (int d = 0; d <= kValueTotal; ++d) {
      if (word == digit(d)) n = d;
    }
    if (n < 0 || n > setup.counts[i]) return Action::invalid();
    take[i] = n;
  }
  return Action::propose(take);
}

DealOutcome settle(const NegotiationSetup& setup, const ItemCounts& allocation_a, Agent closer) {
  DealOutcome o;
  o.agreed = true;
  o.allocation_a = allocation_a;
  ItemCounts to_b{};
  for (int i = 0; i < kItemTypes; ++i) to_b[i] = setup.counts[i] - allocation_a[i];
  o.points_a = worth(allocation_a, setup.values_a);
  o.points_b = worth(to_b, setup.values_b);
  o.closer = closer;
  return o;
}

NegotiationState step(const NegotiationState& state, const NegotiationSetup& setup, Agent actor,
                      const Action& action, std::vector<TokenId> tokens) {
  if (state.terminal) throw ProtocolError("negotiation: game already finished");
  if (actor != state.to_act) throw ProtocolError("negotiation: agent acted out of turn");
  NegotiationState next = state;
  Action effective = action;
  if (effective.kind == Action::Kind::kAgree && !state.can_agree(actor)) {
    effective = Action::invalid();
  }
  if (effective.kind == Action::Kind::kPropose) {
    for (int i = 0; i < kItemTypes; ++i) {
      if (effective.take[i] < 0 || effective.take[i] > setup.counts[i]) {
        effective = Action::invalid();
        break;
      }
    }
  }
  next.history.push_back({actor, std::move(tokens), effective});
  ++next.turn;
  switch (effective.kind) {
    case Action::Kind::kPropose: {
      ItemCounts alloc_a = effective.take;
      if (actor == Agent::kB) {
        for (int i = 0; i < kItemTypes; ++i) alloc_a[i] = setup.counts[i] - effective.take[i];
      }
      next.proposal_a = alloc_a;
      next.proposer = actor;
      break;
    }
    case Action::Kind::kAgree:
      next.terminal = true;
      next.outcome = settle(setup, *state.proposal_a, actor);
      break;
    default:
      break;
  }
  if (!next.terminal && next.turn >= next.max_turns) {
    next.terminal = true;
    next.outcome = DealOutcome{};
  }
  next.to_act = other(actor);
  return next;
}

std::vector<TokenId> negotiation_context(const Vocabulary& vocab, const NegotiationSetup& setup,
                                         const NegotiationState& state, Agent self) {
  std::vector<TokenId> ctx;
  const ItemCounts& values = setup.values(self);
  for (int i = 0; i < kItemTypes; ++i) {
    ctx.push_back(vocab.id(kItemNames[i]));
    ctx.push_back(vocab.id(digit(setup.counts[i])));
    ctx.push_back(vocab.id(digit(values[i])));
  }
  const TokenId you = vocab.id(kYou), them = vocab.id(kThem);
  for (const auto& u : state.history) {
    ctx.push_back(u.speaker == self ? you : them);
    ctx.insert(ctx.end(), u.tokens.begin(), u.tokens.end());
  }
  return ctx;
}

ProposalGrammar::ProposalGrammar(const Vocabulary& vocab, const ItemCounts& counts,
                                 bool agree_allowed)
    : vocab_(&vocab),
      counts_(counts),
      agree_allowed_(agree_allowed),
      propose_(vocab.id(kPropose)),
      agree_(vocab.id(kAgree)) {
  for (int i = 0; i < kItemTypes; ++i) items_[i] = vocab.id(kItemNames[i]);
  for (int d = 0; d <= kValueTotal; ++d) digits_[d] = vocab.id(digit(d));
}

TokenFilter ProposalGrammar::admissible(std::span<const TokenId> statement) const {
  TokenFilter f = TokenFilter::Constant(vocab_->size(), false);
  const std::size_t k = statement.size();
  if (k == 0) {
    f(propose_) = true;
    if (agree_allowed_) f(agree_) = true;
  } else if (statement[0] != propose_ || k >= static_cast<std::size_t>(kProposalLength)) {
    f(vocab_->stop()) = true;
  } else if (k % 2 == 1) {
    f(items_[(k - 1) / 2]) = true;
  } else {
    const int item = static_cast<int>(k / 2) - 1;
    for (int d = 0; d <= counts_[item]; ++d) f(digits_[d]) = true;
  }
  return f;
}

bool ProposalGrammar::is_complete(std::span<const TokenId> statement) const {
  if (statement.empty()) return false;
  const TokenId last = statement.back();
  if (last == vocab_->stop() || last == vocab_->stop_dialogue()) return true;
  if (statement[0] == agree_) return true;
  return statement.size() >= static_cast<std::size_t>(kProposalLength);
}

ScriptedNegotiator::ScriptedNegotiator(const Vocabulary& vocab, int accept_threshold)
    : vocab_(&vocab), accept_threshold_(accept_threshold) {}

Utterance ScriptedNegotiator::act(const NegotiationSetup& setup, const NegotiationState& state,
                                  Agent self, Rng&) {
  const ItemCounts& mine = setup.values(self);
  if (state.can_agree(self)) {
    ItemCounts received = *state.proposal_a;
    if (self == Agent::kB) {
      for (int i = 0; i < kItemTypes; ++i) received[i] = setup.counts[i] - received[i];
    }
    if (worth(received, mine) >= accept_threshold_) {
      const Action a = Action::agree();
      return {self, utterance_tokens(*vocab_, a), a};
    }
  }
  ItemCounts take{};
  for (int i = 0; i < kItemTypes; ++i) take[i] = mine[i] > 0 ? setup.counts[i] : 0;
  const Action a = Action::propose(take);
  return {self, utterance_tokens(*vocab_, a), a};
}

PolicyNegotiator::PolicyNegotiator(const Vocabulary& vocab, const Parameters& params,
                                   DecoderConfig decoder, EnsembleConfig ensemble,
                                   bool constrained)
    : vocab_(&vocab),
      params_(&params),
      decoder_(std::move(decoder)),
      ensemble_(ensemble),
      constrained_(constrained) {}

Utterance PolicyNegotiator::act(const NegotiationSetup& setup, const NegotiationState& state,
                                Agent self, Rng& rng) {
  const auto ctx = negotiation_context(*vocab_, setup, state, self);
  ProposalGrammar grammar(*vocab_, setup.counts, state.can_agree(self));
  DecoderConfig cfg = decoder_;
  cfg.max_statement_len = std::max(cfg.max_statement_len, kProposalLength);
  const auto decoded = decode_statement(ctx, *params_, cfg, ensemble_,
                                        constrained_ ? &grammar : nullptr, vocab_->stop(),
                                        vocab_->stop_dialogue(), state.turn, rng);
  Action a = parse_utterance(decoded.tokens, *vocab_, setup, state, self);
  return {self, decoded.tokens, a};
}

void NegotiationConfig::validate() const {
  if (max_turns < 1) throw ConfigError("negotiation: max_turns must be >= 1");
  if (opponent_threshold < 0 || opponent_threshold > kValueTotal) {
    throw ConfigError("negotiation: opponent_threshold must lie in [0, 10]");
  }
}

std::vector<Action> candidate_actions(const NegotiationSetup& setup,
                                      const NegotiationState& state) {
  std::vector<Action> out;
  if (state.can_agree(state.to_act)) out.push_back(Action::agree());
  for (int a = 0; a <= setup.counts[0]; ++a)
    for (int b = 0; b <= setup.counts[1]; ++b)
      for (int c = 0; c <= setup.counts[2]; ++c) out.push_back(Action::propose({a, b, c}));
  return out;
}

std::vector<RolloutEstimate> rollout_estimate(const Vocabulary& vocab,
                                              const NegotiationSetup& setup,
                                              const NegotiationState& state,
                                              Negotiator& self_policy, Negotiator& counterpart,
                                              int samples, Rng& rng) {
  if (samples < 1) throw ConfigError("rollout_estimate: samples must be >= 1");
  if (state.terminal) throw ProtocolError("rollout_estimate: game already finished");
  const Agent me = state.to_act;
  const std::uint64_t master = rng();
  const auto candidates = candidate_actions(setup, state);
  std::vector<RolloutEstimate> out;
  out.reserve(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Action& candidate = candidates[c];
    double total = 0.0;
    for (int s = 0; s < samples; ++s) {
      Rng branch = make_rng(master, {c, static_cast<std::uint64_t>(s)});
      NegotiationState st = step(state, setup, me, candidate, utterance_tokens(vocab, candidate));
      while (!st.terminal) {
        const Agent actor = st.to_act;
        Negotiator& who = actor == me ? self_policy : counterpart;
        Utterance u = who.act(setup, st, actor, branch);
        st = step(st, setup, actor, u.action, std::move(u.tokens));
      }
      const DealOutcome& o = *st.outcome;
      total += me == Agent::kA ? o.points_a : o.points_b;
    }
    out.push_back({candidate, total / samples});
  }
  return out;
}

void write_setups(std::ostream& out, std::span<const NegotiationSetup> setups) {
  out << "# negotiation v1: counts<TAB>values_a<TAB>values_b (book,hat,ball)\n";
  auto triple = [&](const ItemCounts& t) { out << t[0] << ',' << t[1] << ',' << t[2]; };
  for (const auto& s : setups) {
    triple(s.counts);
    out << '\t';
    triple(s.values_a);
    out << '\t';
    triple(s.values_b);
    out << '\n';
  }
}

std::vector<NegotiationSetup> read_setups(std::istream& in) {
  std::vector<NegotiationSetup> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, '\t') || !std::getline(ss, b, '\t') || !std::getline(ss, c, '\t')) {
      throw LoadError("setups line " + std::to_string(lineno) + ": expected three fields");
    }
    NegotiationSetup s{parse_triple(a), parse_triple(b), parse_triple(c)};
    const auto v = setup_violations(s);
    if (!v.empty()) {
      throw LoadError("setups line " + std::to_string(lineno) + ": " + v.front());
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace infoseek
