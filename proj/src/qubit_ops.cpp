#include "qdd/qubit_ops.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

namespace qdd {

namespace {

const Complex kI(0.0, 1.0);

void check_site(int site, int n, const char* what) {
    if (n < 1) throw ValidationError(std::string(what) + ": qubit count must be >= 1");
    if (site < 1 || site > n)
        throw ValidationError(std::string(what) + ": site " + std::to_string(site) +
                              " out of range 1.." + std::to_string(n));
}

std::vector<Index> qubit_dims(int n) { return std::vector<Index>(static_cast<size_t>(n), 2); }

// Bit of site `i` (1-based, site 1 most significant) within basis index x.
inline int site_bit(Index x, int i, int n) { return static_cast<int>((x >> (n - i)) & 1); }

} // namespace

const char* to_string(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::x: return "x";
        case PauliAxis::y: return "y";
        case PauliAxis::z: return "z";
    }
    throw ValidationError("to_string: invalid PauliAxis");
}

Matrix pauli(PauliAxis axis) {
    Matrix m = Matrix::Zero(2, 2);
    switch (axis) {
        case PauliAxis::x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case PauliAxis::y:
            m(0, 1) = -kI;
            m(1, 0) = kI;
            break;
        case PauliAxis::z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
    }
    return m;
}

OperatorMatrix pauli_on(PauliAxis axis, int site, int n) {
    check_site(site, n, "pauli_on");
    const Index dim = Index(1) << n;
    if (dim > kDefaultMaxSide)
        throw CapacityError("pauli_on: 2^" + std::to_string(n) + " exceeds capacity");
    const Matrix sigma = pauli(axis);
    Matrix m = Matrix::Zero(dim, dim);
    const Index mask = Index(1) << (n - site);
    for (Index c = 0; c < dim; ++c) {
        const int b = site_bit(c, site, n);
        // Column c of sigma on the site bit; the other factors are identity.
        m(c & ~mask, c) += sigma(0, b);
        m(c | mask, c) += sigma(1, b);
    }
    return OperatorMatrix(qubit_dims(n), std::move(m));
}

OperatorMatrix collective_spin(PauliAxis axis, int n) {
    check_site(1, n, "collective_spin");
    OperatorMatrix total = pauli_on(axis, 1, n);
    for (int i = 2; i <= n; ++i) total.mat += pauli_on(axis, i, n).mat;
    return total;
}

QubitPermutation QubitPermutation::identity(int n) {
    if (n < 1) throw ValidationError("QubitPermutation: qubit count must be >= 1");
    QubitPermutation p;
    p.n = n;
    p.map.resize(static_cast<size_t>(n));
    std::iota(p.map.begin(), p.map.end(), 0);
    return p;
}

QubitPermutation QubitPermutation::transposition(int n, int i, int j) {
    check_site(i, n, "transposition");
    check_site(j, n, "transposition");
    if (i == j) throw ValidationError("transposition: sites must differ");
    QubitPermutation p = identity(n);
    std::swap(p.map[static_cast<size_t>(i - 1)], p.map[static_cast<size_t>(j - 1)]);
    return p;
}

QubitPermutation QubitPermutation::from_cycle(int n, const std::vector<int>& cycle) {
    QubitPermutation p = identity(n);
    if (cycle.empty()) return p;
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int site : cycle) {
        check_site(site, n, "from_cycle");
        if (seen[static_cast<size_t>(site - 1)])
            throw ValidationError("from_cycle: repeated site " + std::to_string(site));
        seen[static_cast<size_t>(site - 1)] = true;
    }
    for (size_t k = 0; k < cycle.size(); ++k) {
        const int from = cycle[k];
        const int to = cycle[(k + 1) % cycle.size()];
        p.map[static_cast<size_t>(from - 1)] = to - 1;
    }
    return p;
}

bool QubitPermutation::is_identity() const {
    for (size_t s = 0; s < map.size(); ++s)
        if (map[s] != static_cast<int>(s)) return false;
    return true;
}

QubitPermutation QubitPermutation::after(const QubitPermutation& first) const {
    if (n != first.n) throw ValidationError("after: permutations act on different registers");
    QubitPermutation out = identity(n);
    for (size_t s = 0; s < map.size(); ++s)
        out.map[s] = map[static_cast<size_t>(first.map[s])];
    return out;
}

QubitPermutation QubitPermutation::inverse() const {
    QubitPermutation out = identity(n);
    for (size_t s = 0; s < map.size(); ++s) out.map[static_cast<size_t>(map[s])] = static_cast<int>(s);
    return out;
}

int QubitPermutation::moved_sites() const {
    int count = 0;
    for (size_t s = 0; s < map.size(); ++s)
        if (map[s] != static_cast<int>(s)) ++count;
    return count;
}

std::string QubitPermutation::cycle_notation() const {
    std::ostringstream out;
    std::vector<bool> seen(map.size(), false);
    for (size_t start = 0; start < map.size(); ++start) {
        if (seen[start] || map[start] == static_cast<int>(start)) continue;
        out << '(';
        size_t s = start;
        bool leading = true;
        while (!seen[s]) {
            seen[s] = true;
            if (!leading) out << ',';
            out << (s + 1);
            leading = false;
            s = static_cast<size_t>(map[s]);
        }
        out << ')';
    }
    std::string text = out.str();
    return text.empty() ? "id" : text;
}

const OperatorMatrix& permutation_unitary(const QubitPermutation& p) {
    if (p.n < 1 || p.map.size() != static_cast<size_t>(p.n))
        throw ValidationError("permutation_unitary: malformed permutation");
    std::vector<bool> hit(p.map.size(), false);
    for (int d : p.map) {
        if (d < 0 || d >= p.n || hit[static_cast<size_t>(d)])
            throw ValidationError("permutation_unitary: map is not a bijection");
        hit[static_cast<size_t>(d)] = true;
    }

    static std::mutex cache_mutex;
    static std::map<std::vector<int>, OperatorMatrix> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto found = cache.find(p.map);
    if (found != cache.end()) return found->second;

    const int n = p.n;
    const Index dim = Index(1) << n;
    if (dim > kDefaultMaxSide)
        throw CapacityError("permutation_unitary: 2^" + std::to_string(n) + " exceeds capacity");
    Matrix u = Matrix::Zero(dim, dim);
    for (Index c = 0; c < dim; ++c) {
        Index r = 0;
        for (int i = 1; i <= n; ++i)
            r |= static_cast<Index>(site_bit(c, i, n)) << (n - p.dest(i));
        u(r, c) = 1.0;
    }
    auto inserted = cache.emplace(p.map, OperatorMatrix(qubit_dims(n), std::move(u)));
    return inserted.first->second;
}

OperatorMatrix swap_gate(int i, int j, int n) {
    return permutation_unitary(QubitPermutation::transposition(n, i, j));
}

OperatorMatrix heisenberg_coupling(int i, int j, int n) {
    check_site(i, n, "heisenberg_coupling");
    check_site(j, n, "heisenberg_coupling");
    if (i == j) throw ValidationError("heisenberg_coupling: sites must differ");
    OperatorMatrix h = OperatorMatrix::zero(qubit_dims(n));
    for (PauliAxis axis : {PauliAxis::x, PauliAxis::y, PauliAxis::z})
        h.mat += pauli_on(axis, i, n).mat * pauli_on(axis, j, n).mat;
    return h;
}

OperatorMatrix xy_coupling(int i, int j, int n) {
    check_site(i, n, "xy_coupling");
    check_site(j, n, "xy_coupling");
    if (i == j) throw ValidationError("xy_coupling: sites must differ");
    OperatorMatrix h = OperatorMatrix::zero(qubit_dims(n));
    for (PauliAxis axis : {PauliAxis::x, PauliAxis::y})
        h.mat += pauli_on(axis, i, n).mat * pauli_on(axis, j, n).mat;
    return h;
}

} // namespace qdd
