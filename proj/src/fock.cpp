#include "fockent/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fockent {

std::string to_string(Statistics s) {
    return s == Statistics::Fermion ? "fermion" : "boson";
}

std::string to_string(Spin s) {
    switch (s) {
        case Spin::Up: return "up";
        case Spin::Down: return "down";
        default: return "none";
    }
}

Statistics statistics_from_string(const std::string& s) {
    if (s == "fermion") return Statistics::Fermion;
    if (s == "boson") return Statistics::Boson;
    throw std::invalid_argument("unknown statistics: " + s);
}

Spin spin_from_string(const std::string& s) {
    if (s == "up") return Spin::Up;
    if (s == "down") return Spin::Down;
    if (s == "none" || s.empty()) return Spin::None;
    throw std::invalid_argument("unknown spin: " + s);
}

std::string ModeLabel::str() const {
    std::string out = site;
    if (!arm.empty()) out += "." + arm;
    if (spin != Spin::None) out += (spin == Spin::Up ? "^up" : "^dn");
    return out;
}

ModeSystem::ModeSystem(Statistics stats, std::vector<ModeLabel> modes, int nmax)
    : ModeSystem(stats, std::move(modes), nmax, {}) {}

ModeSystem::ModeSystem(Statistics stats, std::vector<ModeLabel> modes, int nmax,
                       const std::map<std::string, int>& site_caps)
    : stats_(stats), modes_(std::move(modes)), nmax_(stats == Statistics::Fermion ? 1 : nmax) {
    if (modes_.empty()) throw std::invalid_argument("mode system needs at least one mode");
    if (stats_ == Statistics::Boson && nmax < 1)
        throw std::invalid_argument("bosonic occupation cap must be >= 1");
    std::sort(modes_.begin(), modes_.end());
    for (std::size_t i = 1; i < modes_.size(); ++i)
        if (modes_[i] == modes_[i - 1])
            throw std::invalid_argument("duplicate mode label: " + modes_[i].str());
    for (const auto& [site, cap] : site_caps) {
        if (std::none_of(modes_.begin(), modes_.end(),
                         [&](const ModeLabel& m) { return m.site == site; }))
            throw std::invalid_argument("occupation cap names unknown site: " + site);
        if (stats_ == Statistics::Fermion && cap != 1)
            throw std::invalid_argument("fermionic occupation is capped at 1");
        if (cap < 1) throw std::invalid_argument("occupation cap must be >= 1 on site " + site);
        if (cap > 254)
            throw std::invalid_argument("occupation cap exceeds pattern storage on site " + site);
    }
    caps_.reserve(modes_.size());
    for (const auto& m : modes_) {
        auto it = site_caps.find(m.site);
        caps_.push_back(it == site_caps.end() ? nmax_ : it->second);
    }
}

std::size_t ModeSystem::index_of(const ModeLabel& m) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), m);
    if (it == modes_.end() || !(*it == m))
        throw std::invalid_argument("mode not in system: " + m.str());
    return static_cast<std::size_t>(it - modes_.begin());
}

bool ModeSystem::contains(const ModeLabel& m) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), m);
    return it != modes_.end() && *it == m;
}

std::vector<std::size_t> ModeSystem::site_mode_indices(const std::string& site) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].site == site) out.push_back(i);
    if (out.empty()) throw std::invalid_argument("no modes on site: " + site);
    return out;
}

std::vector<std::string> ModeSystem::site_names() const {
    std::set<std::string> sites;
    for (const auto& m : modes_) sites.insert(m.site);
    return {sites.begin(), sites.end()};
}

ModeSystem ModeSystem::restricted_to(const std::vector<ModeLabel>& kept) const {
    std::map<std::string, int> caps;
    for (const auto& m : kept) caps[m.site] = caps_.at(index_of(m));
    return ModeSystem(stats_, kept, nmax_, caps);
}

int total_count(const OccupationPattern& p) {
    int n = 0;
    for (auto c : p) n += c;
    return n;
}

std::string pattern_to_string(const OccupationPattern& p) {
    std::string out;
    for (auto c : p) {
        if (!out.empty()) out += ",";
        out += std::to_string(static_cast<int>(c));
    }
    return out;
}

QuantumState::QuantumState(const ModeSystem& sys, AmplitudeMap amps, bool normalized, double loss)
    : sys_(sys), amps_(std::move(amps)), normalized_(normalized), truncation_loss_(loss) {
    prune();
}

void QuantumState::prune() {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::norm(it->second) < kAmplitudePruneTol * kAmplitudePruneTol)
            it = amps_.erase(it);
        else
            ++it;
    }
}

QuantumState QuantumState::vacuum(const ModeSystem& sys) {
    AmplitudeMap amps;
    amps[OccupationPattern(sys.size(), 0)] = Cplx(1.0, 0.0);
    return QuantumState(sys, std::move(amps), true, 0.0);
}

QuantumState QuantumState::with_terms(const ModeSystem& sys, const AmplitudeMap& amps) {
    for (const auto& [pat, amp] : amps) {
        if (pat.size() != sys.size())
            throw std::invalid_argument("occupation pattern length does not match mode count");
        for (std::size_t i = 0; i < pat.size(); ++i)
            if (static_cast<int>(pat[i]) > sys.cap(i))
                throw std::invalid_argument("occupation exceeds cap in pattern " +
                                            pattern_to_string(pat));
    }
    QuantumState out(sys, amps, false, 0.0);
    out.normalized_ = std::abs(out.norm() - 1.0) < 1e-12;
    return out;
}

Cplx QuantumState::amplitude(const OccupationPattern& p) const {
    auto it = amps_.find(p);
    return it == amps_.end() ? Cplx(0.0, 0.0) : it->second;
}

double QuantumState::norm() const {
    double n2 = 0.0;
    for (const auto& [pat, amp] : amps_) n2 += std::norm(amp);
    return std::sqrt(n2);
}

NormalizedState QuantumState::normalized() const {
    const double n = norm();
    if (n < 1e-150) throw std::runtime_error("cannot normalize a zero-norm state");
    AmplitudeMap amps = amps_;
    for (auto& [pat, amp] : amps) amp /= n;
    return {QuantumState(sys_, std::move(amps), true, truncation_loss_), n};
}

namespace {

// Parity of occupied modes strictly preceding mode index m.
int preceding_parity(const OccupationPattern& p, std::size_t m) {
    int n = 0;
    for (std::size_t k = 0; k < m; ++k) n += p[k];
    return n & 1;
}

}  // namespace

QuantumState apply_creation(const QuantumState& s, const ModeLabel& m) {
    const std::size_t idx = s.sys_.index_of(m);
    QuantumState::AmplitudeMap out;
    double loss = s.truncation_loss_;
    for (const auto& [pat, amp] : s.amps_) {
        const int n = pat[idx];
        if (s.sys_.statistics() == Statistics::Fermion) {
            if (n == 1) continue;  // Pauli: c†c† = 0
            OccupationPattern q = pat;
            q[idx] = 1;
            const double sign = preceding_parity(pat, idx) ? -1.0 : 1.0;
            out[q] += sign * amp;
        } else {
            if (n == s.sys_.cap(idx)) {
                loss += std::norm(amp) * (n + 1);  // weight the raised term would carry
                continue;
            }
            OccupationPattern q = pat;
            q[idx] = static_cast<std::uint8_t>(n + 1);
            out[q] += std::sqrt(static_cast<double>(n + 1)) * amp;
        }
    }
    return QuantumState(s.sys_, std::move(out), false, loss);
}

QuantumState apply_annihilation(const QuantumState& s, const ModeLabel& m) {
    const std::size_t idx = s.sys_.index_of(m);
    QuantumState::AmplitudeMap out;
    for (const auto& [pat, amp] : s.amps_) {
        const int n = pat[idx];
        if (n == 0) continue;
        OccupationPattern q = pat;
        q[idx] = static_cast<std::uint8_t>(n - 1);
        if (s.sys_.statistics() == Statistics::Fermion) {
            const double sign = preceding_parity(pat, idx) ? -1.0 : 1.0;
            out[q] += sign * amp;
        } else {
            out[q] += std::sqrt(static_cast<double>(n)) * amp;
        }
    }
    return QuantumState(s.sys_, std::move(out), false, s.truncation_loss_);
}

QuantumState add(const QuantumState& a, const QuantumState& b) {
    if (!(a.sys_ == b.sys_)) throw std::invalid_argument("cannot add states of different systems");
    QuantumState::AmplitudeMap out = a.amps_;
    for (const auto& [pat, amp] : b.amps_) out[pat] += amp;
    return QuantumState(a.sys_, std::move(out), false, a.truncation_loss_ + b.truncation_loss_);
}

QuantumState scaled(const QuantumState& a, Cplx c) {
    QuantumState::AmplitudeMap out = a.amps_;
    for (auto& [pat, amp] : out) amp *= c;
    return QuantumState(a.sys_, std::move(out), false, a.truncation_loss_ * std::norm(c));
}

Cplx inner_product(const QuantumState& a, const QuantumState& b) {
    if (!(a.system() == b.system()))
        throw std::invalid_argument("inner product requires matching mode systems");
    // Iterate over the smaller map.
    const QuantumState& small = a.term_count() <= b.term_count() ? a : b;
    const QuantumState& large = a.term_count() <= b.term_count() ? b : a;
    const bool small_is_a = &small == &a;
    Cplx acc(0.0, 0.0);
    for (const auto& [pat, amp] : small.amplitudes()) {
        const Cplx other = large.amplitude(pat);
        acc += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return acc;
}

QuantumState build_from_ops(const ModeSystem& sys, std::span<const CreationTerm> terms) {
    QuantumState acc = scaled(QuantumState::vacuum(sys), Cplx(0.0, 0.0));
    for (const auto& term : terms) {
        QuantumState t = QuantumState::vacuum(sys);
        for (auto it = term.modes.rbegin(); it != term.modes.rend(); ++it)
            t = apply_creation(t, *it);
        acc = add(acc, scaled(t, term.coeff));
    }
    return acc.normalized().state;
}

QuantumState build_from_ops(const ModeSystem& sys, std::initializer_list<CreationTerm> terms) {
    return build_from_ops(sys, std::span<const CreationTerm>(terms.begin(), terms.size()));
}

SectorProjection number_sector_project(const QuantumState& s, int n) {
    QuantumState::AmplitudeMap out;
    for (const auto& [pat, amp] : s.amplitudes())
        if (total_count(pat) == n) out[pat] = amp;
    QuantumState proj = out.empty()
        ? scaled(QuantumState::vacuum(s.system()), Cplx(0.0, 0.0))
        : QuantumState::with_terms(s.system(), out);
    return {proj, proj.norm()};
}

BasisEnumeration::BasisEnumeration(const ModeSystem& sys) : sys_(sys), dim_(1) {
    radices_.reserve(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const std::size_t radix = static_cast<std::size_t>(sys.cap(i)) + 1;
        radices_.push_back(static_cast<int>(radix));
        const std::size_t next = dim_ * radix;
        if (next / radix != dim_ || next > (1u << 24))
            throw std::invalid_argument("basis enumeration too large for dense representation");
        dim_ = next;
    }
}

OccupationPattern BasisEnumeration::pattern(std::size_t index) const {
    if (index >= dim_) throw std::out_of_range("basis index out of range");
    OccupationPattern p(sys_.size(), 0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const std::size_t radix = static_cast<std::size_t>(radices_[k]);
        p[k] = static_cast<std::uint8_t>(index % radix);
        index /= radix;
    }
    return p;
}

std::size_t BasisEnumeration::index(const OccupationPattern& p) const {
    if (p.size() != sys_.size())
        throw std::invalid_argument("pattern length does not match system");
    std::size_t idx = 0;
    for (std::size_t k = p.size(); k-- > 0;) {
        if (static_cast<int>(p[k]) >= radices_[k])
            throw std::invalid_argument("occupation exceeds cap in pattern " + pattern_to_string(p));
        idx = idx * static_cast<std::size_t>(radices_[k]) + p[k];
    }
    return idx;
}

std::vector<Cplx> BasisEnumeration::to_dense(const QuantumState& s) const {
    if (!(s.system() == sys_))
        throw std::invalid_argument("state system does not match enumeration");
    std::vector<Cplx> v(dim_, Cplx(0.0, 0.0));
    for (const auto& [pat, amp] : s.amplitudes()) v[index(pat)] = amp;
    return v;
}

QuantumState BasisEnumeration::from_dense(std::span<const Cplx> amps, bool assume_normalized) const {
    if (amps.size() != dim_)
        throw std::invalid_argument("dense vector length does not match enumeration");
    QuantumState::AmplitudeMap out;
    for (std::size_t i = 0; i < dim_; ++i)
        if (std::norm(amps[i]) >= kAmplitudePruneTol * kAmplitudePruneTol)
            out[pattern(i)] = amps[i];
    QuantumState s = out.empty()
        ? scaled(QuantumState::vacuum(sys_), Cplx(0.0, 0.0))
        : QuantumState::with_terms(sys_, out);
    if (assume_normalized && !s.is_normalized())
        throw std::runtime_error("dense vector was not normalized as claimed");
    return s;
}

}  // namespace fockent
