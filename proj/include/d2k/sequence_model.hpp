#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace d2k {

enum class Base : std::uint8_t { A = 0, C = 1, G = 2, T = 3 };

char to_char(Base b);
// Accepts upper or lower case letters; nullopt for anything outside ACGT.
std::optional<Base> base_from_char(char ch);

// DNA string, 2-bit packed (A=00 C=01 G=10 T=11), 32 bases per word.
// One zero tail word is kept so unaligned 64-bit fetches never run off the end.
class Sequence {
public:
    explicit Sequence(std::string_view letters);
    static Sequence from_codes(const std::uint8_t* codes, std::size_t n);
    static Sequence from_codes(const std::vector<std::uint8_t>& codes);

    std::size_t size() const { return n_; }

    std::uint8_t code(std::size_t i) const {
        const std::size_t bit = 2 * i;
        return static_cast<std::uint8_t>((words_[bit >> 6] >> (bit & 63)) & 3u);
    }
    Base operator[](std::size_t i) const { return static_cast<Base>(code(i)); }

    // Codes of bases [pos, pos+len), len <= 32, packed into the low 2*len bits.
    std::uint64_t packed(std::size_t pos, unsigned len) const {
        const std::size_t bit = 2 * pos;
        std::uint64_t w = words_[bit >> 6] >> (bit & 63);
        if ((bit & 63) != 0) w |= words_[(bit >> 6) + 1] << (64 - (bit & 63));
        const unsigned nb = 2 * len;
        return nb >= 64 ? w : (w & ((std::uint64_t{1} << nb) - 1));
    }

    const std::uint64_t* words() const { return words_.data(); }
    std::size_t word_count() const { return words_.size(); }

    std::string str() const;

private:
    Sequence() = default;
    std::vector<std::uint64_t> words_;
    std::size_t n_ = 0;
};

// Number of C/G letters in the whole sequence.
std::int64_t gc_count(const Sequence& s);
// Positions where a and b differ; lengths must agree.
std::int64_t hamming(const Sequence& a, const Sequence& b);

// Letter distribution over ACGT. The strand-symmetric family keeps its eta;
// a distribution built from raw frequencies carries no eta and only the
// k = 0 general-alphabet results apply to it.
class LetterDistribution {
public:
    static LetterDistribution strand_symmetric(double eta);
    static LetterDistribution from_frequencies(double a, double c, double g, double t);

    double xi(Base b) const { return xi_[static_cast<std::size_t>(b)]; }
    const std::array<double, 4>& frequencies() const { return xi_; }
    std::optional<double> eta() const { return eta_; }
    bool has_eta() const { return eta_.has_value(); }
    // Throws when eta is absent, pointing callers at the k = 0 general path.
    double require_eta(const char* operation) const;

private:
    LetterDistribution(const std::array<double, 4>& xi, std::optional<double> eta);
    std::array<double, 4> xi_;
    std::optional<double> eta_;
};

LetterDistribution strand_symmetric(double eta);

// p_t = sum over letters of xi^t, the t-fold letter collision probability.
double collision_moment(const LetterDistribution& dist, int t);

// Shared (n, m, k) bundle: sequence length, word length, mismatch budget.
// n_bar is the number of word windows per sequence.
struct MatchParams {
    std::int64_t n;
    int m;
    int k;
    MatchParams(std::int64_t n, int m, int k);
    std::int64_t n_bar() const { return n - m + 1; }
};

// Reads one plain ACGT text (whitespace ignored, case folded). A '>' line
// is rejected with a hint to strip FASTA headers first.
Sequence load_sequence_file(const std::string& path);

}  // namespace d2k
