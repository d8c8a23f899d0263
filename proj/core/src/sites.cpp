#include "qcmps/sites.hpp"

#include "qcmps/errors.hpp"

#include <algorithm>

namespace qcmps {

std::string to_string(SiteOrdering ordering) {
    return ordering == SiteOrdering::interleaved ? "interleaved" : "blocked";
}

SiteOrdering parse_site_ordering(std::string_view text) {
    if (text == "interleaved")
        return SiteOrdering::interleaved;
    if (text == "blocked")
        return SiteOrdering::blocked;
    throw ContractViolation("unknown site ordering '" + std::string(text) + "'");
}

std::size_t spin_orbital_site(std::size_t orbital, Spin spin, std::size_t n_orb,
                              SiteOrdering ordering) {
    const auto s = static_cast<std::size_t>(spin);
    return ordering == SiteOrdering::interleaved ? 2 * orbital + s : orbital + s * n_orb;
}

std::size_t orbital_of_site(std::size_t site, std::size_t n_orb, SiteOrdering ordering) {
    return ordering == SiteOrdering::interleaved ? site / 2 : site % n_orb;
}

Spin spin_of_site(std::size_t site, std::size_t n_orb, SiteOrdering ordering) {
    if (ordering == SiteOrdering::interleaved)
        return site % 2 == 0 ? Spin::alpha : Spin::beta;
    return site < n_orb ? Spin::alpha : Spin::beta;
}

std::vector<std::size_t> aufbau_occupied_sites(std::size_t n_orb, int n_elec, int ms2,
                                               SiteOrdering ordering) {
    require(n_elec >= 0 && static_cast<std::size_t>(n_elec) <= 2 * n_orb,
            "electron count out of range for " + std::to_string(n_orb) + " orbitals");
    require((n_elec + ms2) % 2 == 0 && ms2 >= -n_elec && ms2 <= n_elec,
            "MS2 inconsistent with electron count");
    const auto n_alpha = static_cast<std::size_t>((n_elec + ms2) / 2);
    const auto n_beta = static_cast<std::size_t>((n_elec - ms2) / 2);
    require(n_alpha <= n_orb && n_beta <= n_orb, "spin occupation exceeds orbital count");

    std::vector<std::size_t> sites;
    for (std::size_t p = 0; p < n_alpha; ++p)
        sites.push_back(spin_orbital_site(p, Spin::alpha, n_orb, ordering));
    for (std::size_t p = 0; p < n_beta; ++p)
        sites.push_back(spin_orbital_site(p, Spin::beta, n_orb, ordering));
    std::sort(sites.begin(), sites.end());
    return sites;
}

} // namespace qcmps
