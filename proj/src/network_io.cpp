#include "covertime/network_io.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "covertime/error.hpp"

namespace covertime {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ValidationError(std::string("network file: missing field '") + name + "'");
  return *it;
}

void only_fields(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok)
      throw ValidationError(std::string("network file: unknown field '") + it.key() + "' in " +
                            where);
  }
}

}  // namespace

NetworkSpec parse_network_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("network file: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("network file: top level must be an object");
  only_fields(doc, {"states", "edges", "start", "targets"}, "document");

  try {
    NetworkSpec spec;
    std::map<std::string, int> index;
    for (const auto& s : field(doc, "states")) {
      auto label = s.get<std::string>();
      if (!index.emplace(label, static_cast<int>(spec.labels.size())).second)
        throw ValidationError("network file: duplicate state '" + label + "'");
      spec.labels.push_back(label);
    }
    const int n = static_cast<int>(spec.labels.size());
    if (n == 0) throw ValidationError("network file: no states");
    auto lookup = [&](const json& v, const char* what) {
      const auto label = v.get<std::string>();
      auto it = index.find(label);
      if (it == index.end())
        throw ValidationError(std::string("network file: unknown state '") + label + "' in " + what);
      return it->second;
    };

    spec.generator = Eigen::MatrixXd::Zero(n, n);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : field(doc, "edges")) {
      only_fields(e, {"from", "to", "rate"}, "edge");
      const int i = lookup(field(e, "from"), "edge");
      const int j = lookup(field(e, "to"), "edge");
      const double rate = field(e, "rate").get<double>();
      if (i == j) throw ValidationError("network file: self-loop at '" + spec.labels[i] + "'");
      if (!seen.emplace(i, j).second)
        throw ValidationError("network file: duplicate edge " + spec.labels[i] + " -> " +
                              spec.labels[j]);
      spec.generator(i, j) = rate;
      spec.generator(i, i) -= rate;
    }
    spec.start = lookup(field(doc, "start"), "start");
    for (const auto& t : field(doc, "targets")) spec.targets.push_back(lookup(t, "targets"));
    validate_network(spec);
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("network file: ") + e.what());
  }
}

NetworkSpec read_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network_json(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string network_to_json(const NetworkSpec& spec) {
  json doc;
  const int n = spec.n_states();
  doc["states"] = json::array();
  for (int i = 0; i < n; ++i) doc["states"].push_back(spec.label(i));
  doc["edges"] = json::array();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && spec.generator(i, j) > 0.0)
        doc["edges"].push_back({{"from", spec.label(i)}, {"to", spec.label(j)},
                                {"rate", spec.generator(i, j)}});
  doc["start"] = spec.label(spec.start);
  doc["targets"] = json::array();
  for (int t : spec.targets) doc["targets"].push_back(spec.label(t));
  return doc.dump(1) + "\n";
}

NetworkSpec periodic_lattice(int g, int side, double k) {
  if (g < 1) throw ValidationError("lattice dimension must be >= 1");
  if (side < 2 || side % 2 != 0) throw ValidationError("lattice side must be even and >= 2");
  if (!(k > 0.0)) throw ValidationError("hop rate must be positive");
  int n = 1;
  for (int d = 0; d < g; ++d) {
    if (n > 1000000 / side) throw ValidationError("lattice too large");
    n *= side;
  }
  NetworkSpec spec;
  spec.generator = Eigen::MatrixXd::Zero(n, n);
  spec.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string label;
    int stride = 1;
    for (int d = 0; d < g; ++d) {
      const int c = i / stride % side;
      label += (d ? "," : "") + std::to_string(c);
      for (int step : {1, side - 1}) {
        const int j = i + ((c + step) % side - c) * stride;
        if (j != i) spec.generator(i, j) = k;
      }
      stride *= side;
    }
    spec.labels[i] = label;
    spec.generator(i, i) = -spec.generator.row(i).sum();
  }
  spec.start = 0;
  int antipode = 0, stride = 1;
  for (int d = 0; d < g; ++d, stride *= side) antipode += side / 2 * stride;
  spec.targets = {antipode};
  return spec;
}

StateSet states_within(const NetworkSpec& spec, const StateSet& base, int radius) {
  const int n = spec.n_states();
  std::vector<int> dist(n, -1);
  std::deque<int> queue;
  for (int b : base) {
    if (b < 0 || b >= n) throw ValidationError("state out of range");
    if (dist[b] < 0) queue.push_back(b);
    dist[b] = 0;
  }
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    if (dist[j] == radius) continue;
    for (int i = 0; i < n; ++i)
      if (i != j && dist[i] < 0 && spec.generator(i, j) > 0.0) {
        dist[i] = dist[j] + 1;
        queue.push_back(i);
      }
  }
  StateSet out;
  for (int i = 0; i < n; ++i)
    if (dist[i] >= 0) out.push_back(i);
  return out;
}

}  // namespace covertime
