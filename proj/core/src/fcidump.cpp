#include "qcmps/fcidump.hpp"

#include "qcmps/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace qcmps {

MolecularIntegrals::MolecularIntegrals(std::size_t n_orb, int n_elec, int ms2)
    : n_orb_(n_orb), n_elec_(n_elec), ms2_(ms2), h1_(n_orb * n_orb, 0.0) {
    require(n_orb >= 1, "NORB must be at least 1");
    require(n_elec >= 0 && static_cast<std::size_t>(n_elec) <= 2 * n_orb,
            "NELEC must lie in [0, 2*NORB]");
    const std::size_t pairs = n_orb * (n_orb + 1) / 2;
    g2_.assign(pairs * (pairs + 1) / 2, 0.0);
}

void MolecularIntegrals::set_h1(std::size_t p, std::size_t q, double value) {
    h1_[p * n_orb_ + q] = value;
    h1_[q * n_orb_ + p] = value;
}

void MolecularIntegrals::set_g2(std::size_t p, std::size_t q, std::size_t r, std::size_t s,
                                double value) {
    g2_[packed_index(p, q, r, s)] = value;
}

std::size_t MolecularIntegrals::packed_index(std::size_t p, std::size_t q, std::size_t r,
                                             std::size_t s) {
    const std::size_t pq = p >= q ? p * (p + 1) / 2 + q : q * (q + 1) / 2 + p;
    const std::size_t rs = r >= s ? r * (r + 1) / 2 + s : s * (s + 1) / 2 + r;
    return pq >= rs ? pq * (pq + 1) / 2 + rs : rs * (rs + 1) / 2 + pq;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// KEY=value pairs of a namelist body; values run until the next KEY=.
std::map<std::string, std::string> parse_namelist(const std::string& body) {
    std::vector<std::pair<std::size_t, std::size_t>> keys; // [key begin, '=' position]
    for (std::size_t pos = body.find('='); pos != std::string::npos; pos = body.find('=', pos + 1)) {
        std::size_t end = pos;
        while (end > 0 && std::isspace(static_cast<unsigned char>(body[end - 1])))
            --end;
        std::size_t begin = end;
        while (begin > 0 && is_key_char(body[begin - 1]))
            --begin;
        keys.emplace_back(begin, pos);
    }
    std::map<std::string, std::string> out;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        const auto [begin, eq] = keys[k];
        std::size_t key_end = eq;
        while (key_end > begin && std::isspace(static_cast<unsigned char>(body[key_end - 1])))
            --key_end;
        const std::size_t value_end = k + 1 < keys.size() ? keys[k + 1].first : body.size();
        out[upper(body.substr(begin, key_end - begin))] = body.substr(eq + 1, value_end - eq - 1);
    }
    return out;
}

std::optional<long> first_integer(std::string_view value) {
    std::string cleaned(value);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::string token;
    if (!(in >> token))
        return std::nullopt;
    long out = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    if (ec != std::errc() || ptr != token.data() + token.size())
        return std::nullopt;
    return out;
}

std::optional<double> parse_fortran_double(std::string_view token) {
    std::string text(token);
    std::replace_if(text.begin(), text.end(), [](char c) { return c == 'D' || c == 'd'; }, 'E');
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty())
        return std::nullopt;
    return value;
}

bool ends_header(std::string_view trimmed, std::string& remainder) {
    const std::string up = upper(trimmed);
    for (std::string_view terminator : {std::string_view("&END"), std::string_view("/")}) {
        if (up.size() >= terminator.size() &&
            up.compare(up.size() - terminator.size(), terminator.size(), terminator) == 0) {
            remainder = std::string(trimmed.substr(0, trimmed.size() - terminator.size()));
            return true;
        }
    }
    return false;
}

} // namespace

ParsedFcidump parse_fcidump(std::istream& in, std::string source_label) {
    std::string line;
    std::size_t line_no = 0;

    std::string header;
    bool terminated = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string remainder;
        const auto trimmed = trim(line);
        if (ends_header(trimmed, remainder)) {
            header += ' ' + remainder;
            terminated = true;
            break;
        }
        header += ' ' + std::string(trimmed);
    }
    if (!terminated)
        throw ParseError("FCIDUMP header is not terminated by '&END' or '/'", line_no);

    auto fci = upper(header).find("&FCI");
    if (fci != std::string::npos)
        header.erase(fci, 4);
    const auto namelist = parse_namelist(header);
    auto header_int = [&](const char* key) {
        const auto it = namelist.find(key);
        if (it == namelist.end())
            throw ParseError(std::string("FCIDUMP header lacks ") + key, line_no);
        const auto value = first_integer(it->second);
        if (!value)
            throw ParseError(std::string("FCIDUMP header key ") + key + " is not an integer",
                             line_no);
        return *value;
    };
    const long norb = header_int("NORB");
    const long nelec = header_int("NELEC");
    const long ms2 = header_int("MS2");
    if (norb < 1)
        throw ParseError("NORB must be positive", line_no);
    if (nelec < 0 || nelec > 2 * norb)
        throw ParseError("NELEC out of range [0, 2*NORB]", line_no);

    const auto n = static_cast<std::size_t>(norb);
    MolecularIntegrals ints(n, static_cast<int>(nelec), static_cast<int>(ms2));
    ints.set_source_label(std::move(source_label));
    FcidumpReport report;

    std::vector<char> h1_seen(n * n, 0);
    std::vector<char> g2_seen(ints.packed_size(), 0);
    bool core_seen = false;
    auto note_duplicate = [&](char& seen, double old_value, double new_value) {
        if (seen) {
            ++report.duplicates;
            if (old_value != new_value)
                ++report.conflicting_duplicates;
        }
        seen = 1;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = trim(line);
        if (trimmed.empty())
            continue;
        std::istringstream fields{std::string(trimmed)};
        std::string value_text;
        std::string index_text[4];
        if (!(fields >> value_text >> index_text[0] >> index_text[1] >> index_text[2] >>
              index_text[3]))
            throw ParseError("record needs a value and four indices", line_no);
        std::string extra;
        if (fields >> extra)
            throw ParseError("trailing field '" + extra + "' in record", line_no);

        const auto value = parse_fortran_double(value_text);
        if (!value)
            throw ParseError("non-numeric value '" + value_text + "'", line_no);
        long idx[4];
        for (int k = 0; k < 4; ++k) {
            const auto& t = index_text[k];
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx[k]);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw ParseError("non-integer index '" + t + "'", line_no);
            if (idx[k] < 0 || idx[k] > norb)
                throw ParseError("index " + t + " outside [0, " + std::to_string(norb) + "]",
                                 line_no);
        }
        ++report.records;

        const auto [i, j, k, l] = std::tuple{idx[0], idx[1], idx[2], idx[3]};
        if (i && j && k && l) {
            const auto slot = MolecularIntegrals::packed_index(i - 1, j - 1, k - 1, l - 1);
            note_duplicate(g2_seen[slot], ints.g2_packed(slot), *value);
            ints.set_g2(i - 1, j - 1, k - 1, l - 1, *value);
        } else if (i && j && !k && !l) {
            const auto p = static_cast<std::size_t>(std::max(i, j) - 1);
            const auto q = static_cast<std::size_t>(std::min(i, j) - 1);
            note_duplicate(h1_seen[p * n + q], ints.h1(p, q), *value);
            ints.set_h1(p, q, *value);
        } else if (!i && !j && !k && !l) {
            char seen = core_seen;
            note_duplicate(seen, ints.e_core(), *value);
            core_seen = true;
            ints.set_e_core(*value);
        } else {
            ++report.ignored;
        }
    }
    return {std::move(ints), report};
}

ParsedFcidump read_fcidump(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open FCIDUMP '" + path.string() + "'", 0);
    return parse_fcidump(in, path.filename().string());
}

void write_fcidump(std::ostream& out, const MolecularIntegrals& ints) {
    const std::size_t n = ints.n_orb();
    out << " &FCI NORB=" << n << ",NELEC=" << ints.n_elec() << ",MS2=" << ints.ms2() << ",\n";
    out << "  ORBSYM=";
    for (std::size_t p = 0; p < n; ++p)
        out << "1,";
    out << "\n  ISYM=1,\n &END\n";

    std::ostringstream buf;
    buf << std::setprecision(17);
    auto record = [&](double v, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        buf << v << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
    };
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            for (std::size_t r = 0; r <= p; ++r)
                for (std::size_t s = 0; s <= r; ++s) {
                    if (r == p && s > q)
                        break;
                    const double v = ints.g2(p, q, r, s);
                    if (v != 0.0)
                        record(v, p + 1, q + 1, r + 1, s + 1);
                }
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            if (ints.h1(p, q) != 0.0)
                record(ints.h1(p, q), p + 1, q + 1, 0, 0);
    record(ints.e_core(), 0, 0, 0, 0);
    out << buf.str();
}

void write_fcidump(const std::filesystem::path& path, const MolecularIntegrals& ints) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write FCIDUMP '" + path.string() + "'");
    write_fcidump(out, ints);
}

SpinOrbitalIntegrals::SpinOrbitalIntegrals(const MolecularIntegrals& ints, SiteOrdering ordering)
    : ints_(ints), ordering_(ordering) {}

double SpinOrbitalIntegrals::hso(std::size_t P, std::size_t Q) const {
    const std::size_t n = ints_.n_orb();
    if (spin_of_site(P, n, ordering_) != spin_of_site(Q, n, ordering_))
        return 0.0;
    return ints_.h1(orbital_of_site(P, n, ordering_), orbital_of_site(Q, n, ordering_));
}

double SpinOrbitalIntegrals::coulomb(std::size_t P, std::size_t Q, std::size_t R,
                                     std::size_t S) const {
    const std::size_t n = ints_.n_orb();
    if (spin_of_site(P, n, ordering_) != spin_of_site(R, n, ordering_) ||
        spin_of_site(Q, n, ordering_) != spin_of_site(S, n, ordering_))
        return 0.0;
    return ints_.g2(orbital_of_site(P, n, ordering_), orbital_of_site(R, n, ordering_),
                    orbital_of_site(Q, n, ordering_), orbital_of_site(S, n, ordering_));
}

double SpinOrbitalIntegrals::antisymmetrized(std::size_t P, std::size_t Q, std::size_t R,
                                             std::size_t S) const {
    return coulomb(P, Q, R, S) - coulomb(P, Q, S, R);
}

} // namespace qcmps
