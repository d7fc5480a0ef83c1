#include "monoflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "monoflow/errors.hpp"

namespace monoflow {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  std::string s = (pos == std::string::npos) ? line : line.substr(0, pos);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_b(double b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", b);
  return buf;
}

}  // namespace

PowerNetwork::PowerNetwork(int node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)) {
  if (n_ < 2) throw ValidationError("network needs at least 2 nodes (node 0 is the reference)");
  std::set<std::pair<int, int>> seen;
  adj_.assign(n_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.k < 0 || ed.k >= n_ || ed.m < 0 || ed.m >= n_)
      throw ValidationError("edge endpoint out of range: " + std::to_string(ed.k) + " " +
                            std::to_string(ed.m));
    if (ed.k == ed.m) throw ValidationError("self-loop at node " + std::to_string(ed.k));
    const auto key = std::minmax(ed.k, ed.m);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate edge " + std::to_string(ed.k) + "-" + std::to_string(ed.m));
    if (!std::isfinite(ed.b)) throw ValidationError("non-finite susceptance on edge " +
                                                    std::to_string(ed.k) + "-" + std::to_string(ed.m));
    if (ed.b == 0.0) throw ValidationError("zero susceptance on edge " + std::to_string(ed.k) + "-" +
                                           std::to_string(ed.m));
    adj_[ed.k].push_back({ed.m, static_cast<int>(e)});
    adj_[ed.m].push_back({ed.k, static_cast<int>(e)});
  }
  // Connectivity from the reference node.
  std::vector<char> visited(n_, 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [w, e] : adj_[v]) {
      if (!visited[w]) {
        visited[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n_) throw ValidationError("network is disconnected");
}

PowerNetwork PowerNetwork::parse_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = strip_comment(line);
    if (s.empty()) continue;
    std::istringstream ls(s);
    if (n < 0) {
      std::string tag;
      ls >> tag >> n;
      if (tag != "n" || ls.fail() || n < 0)
        throw ParseError("line " + std::to_string(lineno) + ": expected header `n <node-count>`");
      std::string rest;
      if (ls >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens after header");
      continue;
    }
    int k, m;
    double b;
    ls >> k >> m >> b;
    if (ls.fail())
      throw ParseError("line " + std::to_string(lineno) + ": expected `<k> <m> <b>`");
    std::string rest;
    if (ls >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens");
    edges.push_back({k, m, b});
  }
  if (n < 0) throw ParseError("missing header line `n <node-count>`");
  return PowerNetwork(n, std::move(edges));
}

PowerNetwork PowerNetwork::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw ParseError("JSON network needs fields \"n\" and \"edges\"");
  std::vector<Edge> edges;
  for (const auto& item : j.at("edges")) {
    if (!item.is_array() || item.size() != 3)
      throw ParseError("each edge must be [k, m, b]");
    edges.push_back({item[0].get<int>(), item[1].get<int>(), item[2].get<double>()});
  }
  return PowerNetwork(j.at("n").get<int>(), std::move(edges));
}

PowerNetwork PowerNetwork::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json(buf.str());
  return parse_text(buf.str());
}

std::string PowerNetwork::to_text() const {
  std::ostringstream out;
  out << "n " << n_ << "\n";
  for (const Edge& e : edges_) out << e.k << " " << e.m << " " << format_b(e.b) << "\n";
  return out.str();
}

std::string PowerNetwork::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  auto& arr = j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : edges_) arr.push_back({e.k, e.m, e.b});
  return j.dump();
}

void PowerNetwork::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << (path.extension() == ".json" ? to_json() : to_text());
}

RVec PowerNetwork::susceptances() const {
  RVec b(edge_count());
  for (int e = 0; e < edge_count(); ++e) b[e] = edges_[e].b;
  return b;
}

bool PowerNetwork::is_biconnected() const {
  if (n_ <= 2) return true;
  // Iterative articulation-point search (Hopcroft-Tarjan lowpoints).
  std::vector<int> disc(n_, -1), low(n_, 0), parent(n_, -1), child_count(n_, 0);
  std::vector<std::size_t> edge_pos(n_, 0);
  int timer = 0;
  std::vector<int> stack{0};
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    const int v = stack.back();
    if (edge_pos[v] < adj_[v].size()) {
      const int w = adj_[v][edge_pos[v]].first;
      ++edge_pos[v];
      if (disc[w] == -1) {
        parent[w] = v;
        ++child_count[v];
        disc[w] = low[w] = timer++;
        stack.push_back(w);
      } else if (w != parent[v]) {
        low[v] = std::min(low[v], disc[w]);
      }
    } else {
      stack.pop_back();
      const int p = parent[v];
      if (p != -1) {
        low[p] = std::min(low[p], low[v]);
        if (p != 0 && low[v] >= disc[p]) return false;  // p is an articulation point
      }
    }
  }
  return child_count[0] < 2;
}

NetworkFamily parse_family(const std::string& name) {
  if (name == "complete") return NetworkFamily::Complete;
  if (name == "cycle") return NetworkFamily::Cycle;
  if (name == "path") return NetworkFamily::Path;
  if (name == "star") return NetworkFamily::Star;
  throw ValidationError("unknown family `" + name + "` (complete, cycle, path, star)");
}

const char* family_name(NetworkFamily family) {
  switch (family) {
    case NetworkFamily::Complete: return "complete";
    case NetworkFamily::Cycle: return "cycle";
    case NetworkFamily::Path: return "path";
    case NetworkFamily::Star: return "star";
  }
  return "?";
}

double draw_susceptance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (;;) {
    const double b = dist(rng);
    if (std::abs(b) >= 0.1) return b;  // keep susceptances away from zero
  }
}

PowerNetwork make_network(NetworkFamily family, int n, SusceptanceMode mode, std::uint64_t seed) {
  if (n < 2) throw ValidationError("family networks need n >= 2");
  std::vector<PowerNetwork::Edge> edges;
  switch (family) {
    case NetworkFamily::Complete:
      for (int k = 0; k < n; ++k)
        for (int m = k + 1; m < n; ++m) edges.push_back({k, m, 1.0});
      break;
    case NetworkFamily::Cycle:
      if (n < 3) throw ValidationError("cycle networks need n >= 3");
      for (int k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n, 1.0});
      break;
    case NetworkFamily::Path:
      for (int k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1, 1.0});
      break;
    case NetworkFamily::Star:
      for (int m = 1; m < n; ++m) edges.push_back({0, m, 1.0});
      break;
  }
  if (mode != SusceptanceMode::Unit) {
    constexpr std::uint64_t kFixedSeed = 0x6d6f6e6f666c6f77ULL;  // "monoflow"
    std::mt19937_64 rng(mode == SusceptanceMode::FixedSeed ? kFixedSeed : seed);
    for (auto& e : edges) e.b = draw_susceptance(rng);
  }
  return PowerNetwork(n, std::move(edges));
}

}  // namespace monoflow
