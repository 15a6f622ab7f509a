#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locdep/errors.hpp"

namespace locdep {

// Nested dependency-neighborhood structures.  A system holds, per index i,
// the sets A_i (LD1), B_i (LD2), C_i (LD3) and B*_i, C*_i, D*_i (LD4*),
// with A_i <= B_i <= C_i and B_i <= B*_i <= C*_i <= D*_i.  Index labels are
// opaque strings; internally indices are dense 0..n-1 ids.

enum class Level { LD1 = 1, LD2 = 2, LD3 = 3, LD4Star = 4 };

std::string level_name(Level level);
Level level_from_name(const std::string& name);

using IndexSet = std::vector<std::int32_t>;  // sorted, unique

struct KappaStats {
    std::optional<std::int64_t> nb;     // max_i |N(B_i)|,  N(B_i) = {j : B_j & B_i != {}}
    std::optional<std::int64_t> nc;     // max_i max(|N(C_i)|, |{j : i in C_j}|)
    std::optional<std::int64_t> dstar;  // max_i max(|D*_i|, |{j : i in D*_j}|)
    std::optional<std::int64_t> kappa1; // max_i max(|C_i|,  |{j : i in C_j}|)

    std::int64_t require_nb() const;
    std::int64_t require_nc() const;
    std::int64_t require_dstar() const;
    std::int64_t require_kappa1() const;
    // Lemma 3.2 uses the same maximum as the D* statistic.
    std::int64_t require_kappa2() const { return require_dstar(); }
};

struct Violation {
    std::string index;
    std::string message;
};

class NeighborhoodSystem {
public:
    NeighborhoodSystem() = default;

    // LD1 system from a symmetric adjacency relation; A_i = {i} union the
    // graph neighbors of i.  Labels not listed as vertices are rejected.
    static NeighborhoodSystem from_adjacency(
        const std::vector<std::string>& vertices,
        const std::vector<std::pair<std::string, std::string>>& edges);
    static NeighborhoodSystem from_adjacency(
        std::int64_t n_vertices,
        const std::vector<std::pair<std::int64_t, std::int64_t>>& edges);

    // LD4* system over a d-dimensional box with sup-metric balls of radii
    // m, 2m, 3m, 3m, 6m, 9m, each clipped to the box.
    static NeighborhoodSystem lattice_m_dependent(const std::vector<std::int64_t>& shape,
                                                  std::int64_t m);

    // Edge-list text: one "u v" pair per line; a line with a single token
    // declares an isolated vertex; '#' starts a comment.
    static std::pair<std::vector<std::string>, std::vector<std::pair<std::string, std::string>>>
    parse_edge_list(std::istream& in);

    // Fill B, C, B*, C*, D* from the A sets by the union closure rules
    //   B_i = U_{j in A_i} A_j,   C_i = U_{j in B_i} A_j,
    //   B*_i = U_{j in A_i} B_j,  C*_i = U_{j in B*_i} B_j,  D*_i = U_{j in C*_i} B_j.
    NeighborhoodSystem closure_extend() const;

    // Drop levels above `level` (used when only a prefix of the nesting is
    // probabilistically justified for a model).
    NeighborhoodSystem truncated(Level level) const;

    KappaStats kappa_stats() const;

    // Ordered pairs {(i,j) : B_i & B_j != {}} including the diagonal,
    // computed by an inverted-index join.
    std::vector<std::pair<std::int32_t, std::int32_t>> neighbor_pairs_b() const;

    // Empty iff all structural invariants hold.
    std::vector<Violation> validate() const;

    std::int64_t size() const { return static_cast<std::int64_t>(labels_.size()); }
    Level level() const { return level_; }
    const std::string& label(std::int32_t id) const { return labels_[id]; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::int32_t id_of(const std::string& label) const;

    const IndexSet& a(std::int32_t i) const { return a_[i]; }
    const IndexSet& b(std::int32_t i) const { return checked(b_, i, Level::LD2, "B"); }
    const IndexSet& c(std::int32_t i) const { return checked(c_, i, Level::LD3, "C"); }
    const IndexSet& bstar(std::int32_t i) const { return checked(bstar_, i, Level::LD4Star, "B*"); }
    const IndexSet& cstar(std::int32_t i) const { return checked(cstar_, i, Level::LD4Star, "C*"); }
    const IndexSet& dstar(std::int32_t i) const { return checked(dstar_, i, Level::LD4Star, "D*"); }

    // Raw construction for tests and deserialization; callers are expected
    // to run validate() on untrusted input.
    static NeighborhoodSystem from_parts(std::vector<std::string> labels, Level level,
                                         std::vector<IndexSet> a, std::vector<IndexSet> b = {},
                                         std::vector<IndexSet> c = {},
                                         std::vector<IndexSet> bstar = {},
                                         std::vector<IndexSet> cstar = {},
                                         std::vector<IndexSet> dstar = {});

    std::string to_json_string(int indent = -1) const;
    static NeighborhoodSystem from_json_string(const std::string& text);

    // Lattice metadata (set by lattice_m_dependent), used by m-dependent
    // theorem assembly.
    struct LatticeInfo {
        std::vector<std::int64_t> shape;
        std::int64_t m = 0;
    };
    const std::optional<LatticeInfo>& lattice() const { return lattice_; }

private:
    const IndexSet& checked(const std::vector<IndexSet>& sets, std::int32_t i, Level need,
                            const char* what) const;

    std::vector<std::string> labels_;
    Level level_ = Level::LD1;
    std::vector<IndexSet> a_, b_, c_, bstar_, cstar_, dstar_;
    std::optional<LatticeInfo> lattice_;
};

}  // namespace locdep
