#include "arl/mdp_io.hpp"

#include <fstream>

namespace arl {

using nlohmann::json;

json mdp_to_json(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  json P = json::array(), R = json::array();
  for (int h = 0; h < H; ++h) {
    json Ph = json::array(), Rh = json::array();
    for (int s = 0; s < S; ++s) {
      json Ps = json::array(), Rs = json::array();
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.transition(h, s, a);
        Ps.push_back(std::vector<double>(row.begin(), row.end()));
        Rs.push_back(mdp.reward(h, s, a));
      }
      Ph.push_back(std::move(Ps));
      Rh.push_back(std::move(Rs));
    }
    P.push_back(std::move(Ph));
    R.push_back(std::move(Rh));
  }
  return json{{"S", S},
              {"A", A},
              {"H", H},
              {"P", std::move(P)},
              {"R", std::move(R)},
              {"s1", mdp.initial_state()},
              {"reward_noise", mdp.reward_noise() == RewardNoise::kBernoulli
                                   ? "bernoulli"
                                   : "deterministic"}};
}

TabularMDP mdp_from_json(const json& j) {
  const int S = j.at("S").get<int>();
  const int A = j.at("A").get<int>();
  const int H = j.at("H").get<int>();
  std::vector<double> P, R;
  P.reserve(static_cast<std::size_t>(H) * S * A * S);
  R.reserve(static_cast<std::size_t>(H) * S * A);
  const auto& jp = j.at("P");
  const auto& jr = j.at("R");
  if (jp.size() != static_cast<std::size_t>(H) || jr.size() != static_cast<std::size_t>(H))
    throw std::invalid_argument("P and R must have H entries");
  for (int h = 0; h < H; ++h) {
    if (jp[h].size() != static_cast<std::size_t>(S) || jr[h].size() != static_cast<std::size_t>(S))
      throw std::invalid_argument("P[h] and R[h] must have S entries");
    for (int s = 0; s < S; ++s) {
      if (jp[h][s].size() != static_cast<std::size_t>(A) || jr[h][s].size() != static_cast<std::size_t>(A))
        throw std::invalid_argument("P[h][s] and R[h][s] must have A entries");
      for (int a = 0; a < A; ++a) {
        const auto row = jp[h][s][a].get<std::vector<double>>();
        if (row.size() != static_cast<std::size_t>(S))
          throw std::invalid_argument("transition rows must have S entries");
        P.insert(P.end(), row.begin(), row.end());
        R.push_back(jr[h][s][a].get<double>());
      }
    }
  }
  RewardNoise noise = RewardNoise::kDeterministic;
  const std::string kind = j.value("reward_noise", std::string("deterministic"));
  if (kind == "bernoulli")
    noise = RewardNoise::kBernoulli;
  else if (kind != "deterministic")
    throw std::invalid_argument("unknown reward_noise '" + kind + "'");
  return TabularMDP(S, A, H, std::move(P), std::move(R), j.value("s1", 0), noise);
}

json policy_to_json(const DeterministicPolicy& pi) {
  json rows = json::array();
  for (int h = 0; h < pi.horizon(); ++h) {
    std::vector<int> row(pi.num_states());
    for (int s = 0; s < pi.num_states(); ++s) row[s] = pi(h, s);
    rows.push_back(std::move(row));
  }
  return rows;
}

DeterministicPolicy policy_from_json(const json& j) {
  const int H = static_cast<int>(j.size());
  if (H == 0) throw std::invalid_argument("empty policy");
  const int S = static_cast<int>(j[0].size());
  DeterministicPolicy pi(H, S);
  for (int h = 0; h < H; ++h) {
    if (j[h].size() != static_cast<std::size_t>(S))
      throw std::invalid_argument("ragged policy table");
    for (int s = 0; s < S; ++s) pi(h, s) = j[h][s].get<int>();
  }
  return pi;
}

json value_table_to_json(const ValueTable& v) {
  json rows = json::array();
  for (int h = 0; h <= v.horizon(); ++h) {
    const auto r = v.row(h);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

json q_table_to_json(const QTable& q) {
  json out = json::array();
  for (int h = 0; h < q.horizon(); ++h) {
    json hs = json::array();
    for (int s = 0; s < q.num_states(); ++s) {
      const auto r = q.row(h, s);
      hs.push_back(std::vector<double>(r.begin(), r.end()));
    }
    out.push_back(std::move(hs));
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace arl
