#pragma once

#include <cstddef>
#include <vector>

namespace molspec::quantum {

/// Basis label of one composite state: TLS level (0 = g, 1 = e) and each mode's occupation.
struct BasisLabel {
    int tls = 0;
    std::vector<int> occupations;
    bool operator==(const BasisLabel&) const = default;
};

/// Tensor-product space TLS ⊗ mode_0 ⊗ … ⊗ mode_{N−1}, every mode truncated to two levels.
///
/// Ordering is Kronecker order with the TLS factor most significant:
/// index = tls·2^N + Σ_i occ_i·2^(N−1−i). TLS basis is (g, e), mode basis is (0, 1).
class CompositeSpace {
public:
    static constexpr int kLevelsPerMode = 2;
    static constexpr int kMaxModes = 12;

    explicit CompositeSpace(int n_modes = 0);

    int n_modes() const noexcept { return n_modes_; }
    int levels_per_mode() const noexcept { return kLevelsPerMode; }
    std::size_t dim() const noexcept { return std::size_t{2} << n_modes_; }
    /// Dimension of the vibrational factor alone.
    std::size_t mode_dim() const noexcept { return std::size_t{1} << n_modes_; }

    BasisLabel label(std::size_t index) const;
    std::size_t index(const BasisLabel& label) const;

    bool operator==(const CompositeSpace&) const = default;

private:
    int n_modes_;
};

CompositeSpace build_space(int n_modes);

}  // namespace molspec::quantum
