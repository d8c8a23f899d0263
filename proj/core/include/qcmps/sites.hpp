#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qcmps {

/// How spatial orbitals are laid out as spin-orbital sites on the MPS chain.
///   interleaved: site 2p = orbital p alpha, site 2p+1 = orbital p beta
///   blocked:     sites [0, n_orb) alpha, sites [n_orb, 2 n_orb) beta
enum class SiteOrdering { interleaved, blocked };

enum class Spin { alpha = 0, beta = 1 };

std::string to_string(SiteOrdering ordering);
SiteOrdering parse_site_ordering(std::string_view text);

std::size_t spin_orbital_site(std::size_t orbital, Spin spin, std::size_t n_orb,
                              SiteOrdering ordering);
std::size_t orbital_of_site(std::size_t site, std::size_t n_orb, SiteOrdering ordering);
Spin spin_of_site(std::size_t site, std::size_t n_orb, SiteOrdering ordering);

/// Aufbau determinant: the lowest (n_elec + ms2)/2 alpha and (n_elec - ms2)/2
/// beta orbitals, returned as sorted site indices. For the interleaved
/// ordering with ms2 in {0, 1} this is exactly sites [0, n_elec).
std::vector<std::size_t> aufbau_occupied_sites(std::size_t n_orb, int n_elec, int ms2,
                                               SiteOrdering ordering);

} // namespace qcmps
