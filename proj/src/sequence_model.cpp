#include "d2k/sequence_model.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2k {

namespace {

constexpr std::uint64_t kOddBits = 0x5555555555555555ULL;

std::size_t words_needed(std::size_t n) {
    // one extra zero word so packed() may read one word past the last base
    return (2 * n + 63) / 64 + 1;
}

}  // namespace

char to_char(Base b) {
    static constexpr char kLetters[4] = {'A', 'C', 'G', 'T'};
    return kLetters[static_cast<std::size_t>(b)];
}

std::optional<Base> base_from_char(char ch) {
    switch (ch) {
        case 'A': case 'a': return Base::A;
        case 'C': case 'c': return Base::C;
        case 'G': case 'g': return Base::G;
        case 'T': case 't': return Base::T;
        default: return std::nullopt;
    }
}

Sequence::Sequence(std::string_view letters) {
    if (letters.empty()) throw std::invalid_argument("sequence must not be empty");
    n_ = letters.size();
    words_.assign(words_needed(n_), 0);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto b = base_from_char(letters[i]);
        if (!b) {
            std::ostringstream os;
            os << "invalid base '" << letters[i] << "' at position " << i + 1;
            throw std::invalid_argument(os.str());
        }
        const std::size_t bit = 2 * i;
        words_[bit >> 6] |= static_cast<std::uint64_t>(*b) << (bit & 63);
    }
}

Sequence Sequence::from_codes(const std::uint8_t* codes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sequence must not be empty");
    Sequence s;
    s.n_ = n;
    s.words_.assign(words_needed(n), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = 2 * i;
        s.words_[bit >> 6] |= static_cast<std::uint64_t>(codes[i] & 3u) << (bit & 63);
    }
    return s;
}

Sequence Sequence::from_codes(const std::vector<std::uint8_t>& codes) {
    return from_codes(codes.data(), codes.size());
}

std::string Sequence::str() const {
    std::string out(n_, '?');
    for (std::size_t i = 0; i < n_; ++i) out[i] = to_char((*this)[i]);
    return out;
}

std::int64_t gc_count(const Sequence& s) {
    // C=01 and G=10 are exactly the codes whose two bits differ
    std::int64_t total = 0;
    const std::size_t full = s.size() / 32;
    for (std::size_t w = 0; w < full; ++w) {
        const std::uint64_t x = s.words()[w];
        total += std::popcount((x ^ (x >> 1)) & kOddBits);
    }
    for (std::size_t i = full * 32; i < s.size(); ++i) {
        const auto b = s[i];
        total += (b == Base::C || b == Base::G) ? 1 : 0;
    }
    return total;
}

std::int64_t hamming(const Sequence& a, const Sequence& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hamming: sequence lengths differ");
    std::int64_t total = 0;
    const std::size_t full = a.size() / 32;
    for (std::size_t w = 0; w < full; ++w) {
        const std::uint64_t x = a.words()[w] ^ b.words()[w];
        total += std::popcount((x | (x >> 1)) & kOddBits);
    }
    for (std::size_t i = full * 32; i < a.size(); ++i)
        total += a[i] != b[i] ? 1 : 0;
    return total;
}

LetterDistribution::LetterDistribution(const std::array<double, 4>& xi,
                                       std::optional<double> eta)
    : xi_(xi), eta_(eta) {}

LetterDistribution LetterDistribution::strand_symmetric(double eta) {
    if (!(std::abs(eta) < 1.0))
        throw std::domain_error("eta must satisfy |eta| < 1");
    const double at = (1.0 + eta) / 4.0;
    const double cg = (1.0 - eta) / 4.0;
    return LetterDistribution({at, cg, cg, at}, eta);
}

LetterDistribution LetterDistribution::from_frequencies(double a, double c,
                                                        double g, double t) {
    const std::array<double, 4> xi = {a, c, g, t};
    double sum = 0.0;
    for (double x : xi) {
        if (!(x >= 0.0) || !(x <= 1.0))
            throw std::invalid_argument("letter frequencies must lie in [0, 1]");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("letter frequencies must sum to 1");
    return LetterDistribution(xi, std::nullopt);
}

double LetterDistribution::require_eta(const char* operation) const {
    if (!eta_)
        throw std::invalid_argument(std::string(operation) +
                                    ": needs a strand-symmetric distribution; general "
                                    "frequencies support only the k = 0 results");
    return *eta_;
}

LetterDistribution strand_symmetric(double eta) {
    return LetterDistribution::strand_symmetric(eta);
}

double collision_moment(const LetterDistribution& dist, int t) {
    if (t < 2) throw std::invalid_argument("collision_moment: t must be >= 2");
    double sum = 0.0;
    for (double x : dist.frequencies()) sum += std::pow(x, t);
    return sum;
}

MatchParams::MatchParams(std::int64_t n_, int m_, int k_) : n(n_), m(m_), k(k_) {
    if (m < 1) throw std::invalid_argument("word length m must be >= 1");
    if (k < 0 || k > m) throw std::invalid_argument("mismatch budget k must satisfy 0 <= k <= m");
    if (n <= m) throw std::invalid_argument("sequence length n must exceed m");
    if (n > std::int64_t{0x7fffffff})
        throw std::invalid_argument("sequence length n must fit in 31 bits");
}

Sequence load_sequence_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string letters;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '>')
            throw std::runtime_error(path +
                                     ": looks like FASTA ('>' line); remove the header, "
                                     "only plain ACGT text is accepted");
        for (char ch : line) {
            if (std::isspace(static_cast<unsigned char>(ch))) continue;
            const auto b = base_from_char(ch);
            if (!b)
                throw std::runtime_error(path + ": invalid base '" + std::string(1, ch) + "'");
            letters.push_back(ch);
        }
    }
    if (letters.empty()) throw std::runtime_error(path + ": no bases found");
    return Sequence(letters);
}

}  // namespace d2k
