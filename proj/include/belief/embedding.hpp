#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace belief {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// Cosine similarity. Zero-norm inputs yield 0 rather than NaN; callers that
// care (conflict resolution) check norms themselves.
inline double cosine_similarity(std::span<const double> x, std::span<const double> y) noexcept {
    if (x.size() != y.size() || x.empty()) return 0.0;
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return dot / std::sqrt(nx * ny);
}

inline double l2_norm(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(std::string_view claim) const = 0;
};

// Hashed character-trigram term frequencies, L2-normalised. Text is
// lower-cased, whitespace runs collapse to one space, and one space of
// padding is added at each end.
class TrigramEmbedder final : public Embedder {
public:
    explicit TrigramEmbedder(std::size_t dim = 512) : dim_(dim) {}

    std::size_t dimension() const noexcept { return dim_; }

    static std::string normalise(std::string_view claim) {
        std::string out = " ";
        bool prev_space = true;
        for (unsigned char c : claim) {
            if (std::isspace(c)) {
                if (!prev_space) out.push_back(' ');
                prev_space = true;
            } else {
                out.push_back(static_cast<char>(std::tolower(c)));
                prev_space = false;
            }
        }
        if (!prev_space) out.push_back(' ');
        return out;
    }

    // The distinct trigrams of the normalised text (exposed for tests).
    static std::vector<std::string> trigrams(std::string_view claim) {
        const std::string text = normalise(claim);
        std::vector<std::string> grams;
        for (std::size_t i = 0; i + 3 <= text.size(); ++i) grams.push_back(text.substr(i, 3));
        return grams;
    }

    std::size_t bucket(std::string_view gram) const noexcept { return fnv1a(gram) % dim_; }

    std::vector<double> embed(std::string_view claim) const override {
        std::vector<double> v(dim_, 0.0);
        for (const auto& g : trigrams(claim)) v[bucket(g)] += 1.0;
        const double n = l2_norm(v);
        if (n > 0.0)
            for (double& x : v) x /= n;
        return v;
    }

private:
    std::size_t dim_;
};

} // namespace belief
