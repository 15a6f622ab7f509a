#include "locdep/neighborhood.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace locdep {

using nlohmann::json;

std::string level_name(Level level) {
    switch (level) {
        case Level::LD1: return "LD1";
        case Level::LD2: return "LD2";
        case Level::LD3: return "LD3";
        case Level::LD4Star: return "LD4*";
    }
    return "?";
}

Level level_from_name(const std::string& name) {
    if (name == "LD1") return Level::LD1;
    if (name == "LD2") return Level::LD2;
    if (name == "LD3") return Level::LD3;
    if (name == "LD4*" || name == "LD4star" || name == "LD4") return Level::LD4Star;
    throw usage_error("unknown dependence level: " + name);
}

namespace {

std::int64_t fail_missing(const char* what) {
    throw capability_error(std::string("kappa statistic ") + what +
                           " needs a higher dependence level than the system carries");
}

void sort_unique(IndexSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

bool is_subset(const IndexSet& small, const IndexSet& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Union of sets[j] over j in over, via a marker scratch.
std::vector<IndexSet> closure_step(const std::vector<IndexSet>& over,
                                   const std::vector<IndexSet>& sets) {
    const std::size_t n = over.size();
    std::vector<IndexSet> out(n);
    std::vector<char> mark(n, 0);
    std::vector<std::int32_t> touched;
    for (std::size_t i = 0; i < n; ++i) {
        touched.clear();
        for (std::int32_t j : over[i]) {
            for (std::int32_t k : sets[j]) {
                if (!mark[k]) {
                    mark[k] = 1;
                    touched.push_back(k);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        out[i] = touched;
        for (std::int32_t k : touched) mark[k] = 0;
    }
    return out;
}

std::int64_t max_card(const std::vector<IndexSet>& sets) {
    std::int64_t best = 0;
    for (const auto& s : sets) best = std::max<std::int64_t>(best, static_cast<std::int64_t>(s.size()));
    return best;
}

// max_i |{j : i in sets[j]}| -- the transpose cardinality.
std::int64_t max_transpose_card(const std::vector<IndexSet>& sets, std::size_t n) {
    std::vector<std::int64_t> count(n, 0);
    for (const auto& s : sets)
        for (std::int32_t k : s) ++count[k];
    std::int64_t best = 0;
    for (auto c : count) best = std::max(best, c);
    return best;
}

}  // namespace

std::int64_t KappaStats::require_nb() const { return nb ? *nb : fail_missing("kappa_nb"); }
std::int64_t KappaStats::require_nc() const { return nc ? *nc : fail_missing("kappa_nc"); }
std::int64_t KappaStats::require_dstar() const { return dstar ? *dstar : fail_missing("kappa_dstar"); }
std::int64_t KappaStats::require_kappa1() const { return kappa1 ? *kappa1 : fail_missing("kappa1"); }

std::int32_t NeighborhoodSystem::id_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return static_cast<std::int32_t>(i);
    throw structural_error("unknown index label: " + label);
}

const IndexSet& NeighborhoodSystem::checked(const std::vector<IndexSet>& sets, std::int32_t i,
                                            Level need, const char* what) const {
    if (static_cast<int>(level_) < static_cast<int>(need))
        throw capability_error(std::string(what) + " sets absent: system level is " +
                               level_name(level_));
    return sets[i];
}

NeighborhoodSystem NeighborhoodSystem::from_adjacency(
    const std::vector<std::string>& vertices,
    const std::vector<std::pair<std::string, std::string>>& edges) {
    NeighborhoodSystem sys;
    sys.labels_ = vertices;
    sys.level_ = Level::LD1;
    const std::size_t n = vertices.size();
    std::unordered_map<std::string, std::int32_t> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!ids.emplace(vertices[i], static_cast<std::int32_t>(i)).second)
            throw structural_error("duplicate vertex label: " + vertices[i]);
    }
    sys.a_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) sys.a_[i].push_back(static_cast<std::int32_t>(i));
    for (const auto& [u, v] : edges) {
        auto iu = ids.find(u);
        auto iv = ids.find(v);
        if (iu == ids.end()) throw structural_error("edge endpoint not in vertex set: " + u);
        if (iv == ids.end()) throw structural_error("edge endpoint not in vertex set: " + v);
        sys.a_[iu->second].push_back(iv->second);
        sys.a_[iv->second].push_back(iu->second);
    }
    for (auto& s : sys.a_) sort_unique(s);
    return sys;
}

NeighborhoodSystem NeighborhoodSystem::from_adjacency(
    std::int64_t n_vertices, const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
    std::vector<std::string> labels(n_vertices);
    for (std::int64_t i = 0; i < n_vertices; ++i) labels[i] = std::to_string(i);
    std::vector<std::pair<std::string, std::string>> es;
    es.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n_vertices || v < 0 || v >= n_vertices)
            throw structural_error("edge endpoint out of range");
        es.emplace_back(std::to_string(u), std::to_string(v));
    }
    return from_adjacency(labels, es);
}

std::pair<std::vector<std::string>, std::vector<std::pair<std::string, std::string>>>
NeighborhoodSystem::parse_edge_list(std::istream& in) {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, bool> seen;
    auto add_vertex = [&](const std::string& v) {
        if (seen.emplace(v, true).second) vertices.push_back(v);
    };
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string u, v, extra;
        if (!(ls >> u)) continue;
        if (ls >> v) {
            if (ls >> extra) throw usage_error("edge-list line has more than two tokens: " + line);
            add_vertex(u);
            add_vertex(v);
            edges.emplace_back(u, v);
        } else {
            add_vertex(u);
        }
    }
    return {vertices, edges};
}

NeighborhoodSystem NeighborhoodSystem::lattice_m_dependent(const std::vector<std::int64_t>& shape,
                                                           std::int64_t m) {
    if (shape.empty()) throw structural_error("lattice shape must have at least one dimension");
    for (auto e : shape)
        if (e < 1) throw structural_error("lattice extent must be >= 1");
    if (m < 0) throw structural_error("m must be >= 0");

    const std::size_t d = shape.size();
    std::int64_t n = 1;
    for (auto e : shape) {
        if (n > (1LL << 40) / e) throw structural_error("lattice too large");
        n *= e;
    }

    NeighborhoodSystem sys;
    sys.labels_.resize(n);
    std::vector<std::int64_t> coord(d, 0);
    for (std::int64_t id = 0; id < n; ++id) {
        std::string label;
        for (std::size_t k = 0; k < d; ++k) {
            if (k) label += ',';
            label += std::to_string(coord[k]);
        }
        sys.labels_[id] = label;
        for (std::size_t k = d; k-- > 0;) {
            if (++coord[k] < shape[k]) break;
            coord[k] = 0;
        }
    }

    // Row-major id <-> coordinates.
    auto ball = [&](std::int64_t id, std::int64_t radius) {
        std::vector<std::int64_t> center(d);
        std::int64_t rest = id;
        for (std::size_t k = d; k-- > 0;) {
            center[k] = rest % shape[k];
            rest /= shape[k];
        }
        std::vector<std::int64_t> lo(d), hi(d), cur(d);
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::max<std::int64_t>(0, center[k] - radius);
            hi[k] = std::min(shape[k] - 1, center[k] + radius);
            cur[k] = lo[k];
        }
        IndexSet out;
        for (;;) {
            std::int64_t flat = 0;
            for (std::size_t k = 0; k < d; ++k) flat = flat * shape[k] + cur[k];
            out.push_back(static_cast<std::int32_t>(flat));
            std::size_t k = d;
            while (k-- > 0) {
                if (++cur[k] <= hi[k]) break;
                cur[k] = lo[k];
                if (k == 0) {
                    std::sort(out.begin(), out.end());
                    return out;
                }
            }
        }
    };

    sys.level_ = Level::LD4Star;
    sys.a_.resize(n);
    sys.b_.resize(n);
    sys.c_.resize(n);
    sys.bstar_.resize(n);
    sys.cstar_.resize(n);
    sys.dstar_.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        sys.a_[i] = ball(i, m);
        sys.b_[i] = ball(i, 2 * m);
        sys.c_[i] = ball(i, 3 * m);
        sys.bstar_[i] = sys.c_[i];
        sys.cstar_[i] = ball(i, 6 * m);
        sys.dstar_[i] = ball(i, 9 * m);
    }
    sys.lattice_ = LatticeInfo{shape, m};
    return sys;
}

NeighborhoodSystem NeighborhoodSystem::closure_extend() const {
    if (level_ != Level::LD1)
        throw usage_error("closure_extend expects an LD1 system, got " + level_name(level_));
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!std::binary_search(a_[i].begin(), a_[i].end(), static_cast<std::int32_t>(i)))
            throw structural_error("closure_extend requires i in A_i (index " + labels_[i] + ")");
    }
    NeighborhoodSystem out = *this;
    out.level_ = Level::LD4Star;
    out.b_ = closure_step(a_, a_);
    out.c_ = closure_step(out.b_, a_);
    out.bstar_ = closure_step(a_, out.b_);
    out.cstar_ = closure_step(out.bstar_, out.b_);
    out.dstar_ = closure_step(out.cstar_, out.b_);
    return out;
}

NeighborhoodSystem NeighborhoodSystem::truncated(Level level) const {
    if (static_cast<int>(level) > static_cast<int>(level_))
        throw capability_error("cannot truncate " + level_name(level_) + " up to " +
                               level_name(level));
    NeighborhoodSystem out = *this;
    out.level_ = level;
    if (static_cast<int>(level) < 4) {
        out.bstar_.clear();
        out.cstar_.clear();
        out.dstar_.clear();
    }
    if (static_cast<int>(level) < 3) out.c_.clear();
    if (static_cast<int>(level) < 2) out.b_.clear();
    return out;
}

KappaStats NeighborhoodSystem::kappa_stats() const {
    KappaStats stats;
    const std::size_t n = labels_.size();
    if (static_cast<int>(level_) >= 2) {
        // N(B_i) = {j : B_j & B_i != {}} via the neighbor-pair join.
        std::vector<std::int64_t> count(n, 0);
        for (auto [i, j] : neighbor_pairs_b()) {
            (void)j;
            ++count[i];
        }
        std::int64_t best = 0;
        for (auto c : count) best = std::max(best, c);
        stats.nb = best;
    }
    if (static_cast<int>(level_) >= 3) {
        // N(C_i) = {j : C_i & B_j != {}} via the inverted index of B.
        std::vector<std::vector<std::int32_t>> owners_b(n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::int32_t e : b_[j]) owners_b[e].push_back(static_cast<std::int32_t>(j));
        std::vector<char> mark(n, 0);
        std::vector<std::int32_t> touched;
        std::int64_t best_nc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            touched.clear();
            for (std::int32_t e : c_[i]) {
                for (std::int32_t j : owners_b[e]) {
                    if (!mark[j]) {
                        mark[j] = 1;
                        touched.push_back(j);
                    }
                }
            }
            best_nc = std::max(best_nc, static_cast<std::int64_t>(touched.size()));
            for (std::int32_t j : touched) mark[j] = 0;
        }
        const std::int64_t trans_c = max_transpose_card(c_, n);
        stats.nc = std::max(best_nc, trans_c);
        stats.kappa1 = std::max(max_card(c_), trans_c);
    }
    if (level_ == Level::LD4Star) {
        stats.dstar = std::max(max_card(dstar_), max_transpose_card(dstar_, n));
    }
    return stats;
}

std::vector<std::pair<std::int32_t, std::int32_t>> NeighborhoodSystem::neighbor_pairs_b() const {
    if (static_cast<int>(level_) < 2)
        throw capability_error("neighbor_pairs_b needs level >= LD2");
    const std::size_t n = labels_.size();
    // Inverted index: element -> owners.
    std::vector<std::vector<std::int32_t>> owners(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::int32_t e : b_[i]) owners[e].push_back(static_cast<std::int32_t>(i));
    std::vector<std::uint64_t> keys;
    for (const auto& own : owners)
        for (std::int32_t i : own)
            for (std::int32_t j : own)
                keys.push_back((static_cast<std::uint64_t>(i) << 32) |
                               static_cast<std::uint32_t>(j));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    pairs.reserve(keys.size());
    for (auto k : keys)
        pairs.emplace_back(static_cast<std::int32_t>(k >> 32),
                           static_cast<std::int32_t>(k & 0xffffffffULL));
    return pairs;
}

std::vector<Violation> NeighborhoodSystem::validate() const {
    std::vector<Violation> out;
    const std::size_t n = labels_.size();
    auto in_range = [&](const IndexSet& s) {
        for (std::int32_t e : s)
            if (e < 0 || static_cast<std::size_t>(e) >= n) return false;
        return true;
    };
    auto check_nested = [&](const std::vector<IndexSet>& inner, const std::vector<IndexSet>& outer,
                            const char* iname, const char* oname) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_subset(inner[i], outer[i]))
                out.push_back({labels_[i], std::string(iname) + " not a subset of " + oname});
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (!in_range(a_[i])) out.push_back({labels_[i], "A contains an out-of-range index"});
        if (!std::binary_search(a_[i].begin(), a_[i].end(), static_cast<std::int32_t>(i)))
            out.push_back({labels_[i], "i not a member of A_i"});
    }
    if (static_cast<int>(level_) >= 2) {
        for (std::size_t i = 0; i < n; ++i)
            if (!in_range(b_[i])) out.push_back({labels_[i], "B contains an out-of-range index"});
        check_nested(a_, b_, "A", "B");
    }
    if (static_cast<int>(level_) >= 3) {
        for (std::size_t i = 0; i < n; ++i)
            if (!in_range(c_[i])) out.push_back({labels_[i], "C contains an out-of-range index"});
        check_nested(b_, c_, "B", "C");
    }
    if (level_ == Level::LD4Star) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_range(bstar_[i])) out.push_back({labels_[i], "B* out of range"});
            if (!in_range(cstar_[i])) out.push_back({labels_[i], "C* out of range"});
            if (!in_range(dstar_[i])) out.push_back({labels_[i], "D* out of range"});
        }
        check_nested(b_, bstar_, "B", "B*");
        check_nested(bstar_, cstar_, "B*", "C*");
        check_nested(cstar_, dstar_, "C*", "D*");
    }
    return out;
}

NeighborhoodSystem NeighborhoodSystem::from_parts(std::vector<std::string> labels, Level level,
                                                  std::vector<IndexSet> a, std::vector<IndexSet> b,
                                                  std::vector<IndexSet> c,
                                                  std::vector<IndexSet> bstar,
                                                  std::vector<IndexSet> cstar,
                                                  std::vector<IndexSet> dstar) {
    NeighborhoodSystem sys;
    const std::size_t n = labels.size();
    auto fit = [&](std::vector<IndexSet>& sets, Level need, const char* what) {
        if (static_cast<int>(level) >= static_cast<int>(need)) {
            if (sets.size() != n)
                throw structural_error(std::string(what) + " sets missing for declared level");
            for (auto& s : sets) sort_unique(s);
        } else {
            sets.clear();
        }
    };
    if (a.size() != n) throw structural_error("A sets missing");
    for (auto& s : a) sort_unique(s);
    fit(b, Level::LD2, "B");
    fit(c, Level::LD3, "C");
    fit(bstar, Level::LD4Star, "B*");
    fit(cstar, Level::LD4Star, "C*");
    fit(dstar, Level::LD4Star, "D*");
    sys.labels_ = std::move(labels);
    sys.level_ = level;
    sys.a_ = std::move(a);
    sys.b_ = std::move(b);
    sys.c_ = std::move(c);
    sys.bstar_ = std::move(bstar);
    sys.cstar_ = std::move(cstar);
    sys.dstar_ = std::move(dstar);
    return sys;
}

std::string NeighborhoodSystem::to_json_string(int indent) const {
    json j;
    j["level"] = level_name(level_);
    j["indices"] = labels_;
    auto dump_sets = [&](const char* key, const std::vector<IndexSet>& sets) {
        json obj = json::object();
        for (std::size_t i = 0; i < sets.size(); ++i) {
            json arr = json::array();
            for (std::int32_t e : sets[i]) arr.push_back(labels_[e]);
            obj[labels_[i]] = std::move(arr);
        }
        j[key] = std::move(obj);
    };
    dump_sets("A", a_);
    if (static_cast<int>(level_) >= 2) dump_sets("B", b_);
    if (static_cast<int>(level_) >= 3) dump_sets("C", c_);
    if (level_ == Level::LD4Star) {
        dump_sets("Bstar", bstar_);
        dump_sets("Cstar", cstar_);
        dump_sets("Dstar", dstar_);
    }
    return j.dump(indent);
}

NeighborhoodSystem NeighborhoodSystem::from_json_string(const std::string& text) {
    json j = json::parse(text);
    const Level level = level_from_name(j.at("level").get<std::string>());
    std::vector<std::string> labels = j.at("indices").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::int32_t> ids;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!ids.emplace(labels[i], static_cast<std::int32_t>(i)).second)
            throw structural_error("duplicate index label: " + labels[i]);
    auto load_sets = [&](const char* key) {
        std::vector<IndexSet> sets(labels.size());
        if (!j.contains(key)) return sets;
        const json& obj = j.at(key);
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            auto owner = ids.find(it.key());
            if (owner == ids.end()) throw structural_error("set owner not an index: " + it.key());
            IndexSet s;
            for (const auto& e : it.value()) {
                auto found = ids.find(e.get<std::string>());
                if (found == ids.end())
                    throw structural_error("set member not an index: " + e.get<std::string>());
                s.push_back(found->second);
            }
            sets[owner->second] = std::move(s);
        }
        return sets;
    };
    return from_parts(std::move(labels), level, load_sets("A"), load_sets("B"), load_sets("C"),
                      load_sets("Bstar"), load_sets("Cstar"), load_sets("Dstar"));
}

}  // namespace locdep
