#pragma once

#include "qcmps/sites.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcmps {

/// Spatial-orbital integrals in chemists' notation. The one-electron matrix is
/// stored symmetric; the two-electron tensor keeps one representative of each
/// 8-fold permutation class (p>=q, r>=s, pq>=rs).
class MolecularIntegrals {
public:
    MolecularIntegrals(std::size_t n_orb, int n_elec, int ms2);

    std::size_t n_orb() const noexcept { return n_orb_; }
    int n_elec() const noexcept { return n_elec_; }
    int ms2() const noexcept { return ms2_; }

    double e_core() const noexcept { return e_core_; }
    void set_e_core(double value) noexcept { e_core_ = value; }

    double h1(std::size_t p, std::size_t q) const { return h1_[p * n_orb_ + q]; }
    void set_h1(std::size_t p, std::size_t q, double value);

    double g2(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
        return g2_[packed_index(p, q, r, s)];
    }
    void set_g2(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double value);

    /// Canonical storage slot shared by all 8 permutations of (pq|rs).
    static std::size_t packed_index(std::size_t p, std::size_t q, std::size_t r, std::size_t s);
    std::size_t packed_size() const noexcept { return g2_.size(); }
    double g2_packed(std::size_t slot) const { return g2_[slot]; }

    const std::string& source_label() const noexcept { return source_label_; }
    void set_source_label(std::string label) { source_label_ = std::move(label); }

    friend bool operator==(const MolecularIntegrals&, const MolecularIntegrals&) = default;

private:
    std::size_t n_orb_;
    int n_elec_;
    int ms2_;
    double e_core_ = 0.0;
    std::vector<double> h1_;
    std::vector<double> g2_;
    std::string source_label_;
};

struct FcidumpReport {
    std::size_t records = 0;
    /// Records that landed on an already-written storage slot (last one wins).
    std::size_t duplicates = 0;
    /// The subset of duplicates whose value differed from the earlier record.
    std::size_t conflicting_duplicates = 0;
    /// Well-formed records of other kinds (e.g. orbital energies "e i 0 0 0").
    std::size_t ignored = 0;
};

struct ParsedFcidump {
    MolecularIntegrals integrals;
    FcidumpReport report;
};

ParsedFcidump parse_fcidump(std::istream& in, std::string source_label = {});
ParsedFcidump read_fcidump(const std::filesystem::path& path);

/// Emits every stored value at 17 significant digits, so parsing the output
/// reproduces the integrals bit for bit.
void write_fcidump(std::ostream& out, const MolecularIntegrals& ints);
void write_fcidump(const std::filesystem::path& path, const MolecularIntegrals& ints);

/// Spin-orbital view over spatial integrals for a given site ordering.
class SpinOrbitalIntegrals {
public:
    SpinOrbitalIntegrals(const MolecularIntegrals& ints, SiteOrdering ordering);

    std::size_t n_sites() const noexcept { return 2 * ints_.n_orb(); }
    SiteOrdering ordering() const noexcept { return ordering_; }

    double hso(std::size_t P, std::size_t Q) const;
    /// <PQ|RS> in physicists' notation = (PR|QS) with spin selection.
    double coulomb(std::size_t P, std::size_t Q, std::size_t R, std::size_t S) const;
    /// <PQ||RS> = <PQ|RS> - <PQ|SR>.
    double antisymmetrized(std::size_t P, std::size_t Q, std::size_t R, std::size_t S) const;

private:
    MolecularIntegrals ints_;
    SiteOrdering ordering_;
};

} // namespace qcmps
