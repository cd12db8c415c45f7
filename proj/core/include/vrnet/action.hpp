#pragma once

#include <cstddef>
#include <vector>

namespace vrnet {

/// One SBS's joint downlink + uplink allocation to its served users.
///
/// Users are addressed by their local index within the SBS (the order of
/// NetworkState::served). Downlink is identified by block counts only; the
/// concrete blocks are contiguous in local-user order. Uplink is an explicit
/// owner per block. An SBS without served users plays the empty action.
struct Action {
    std::vector<int> dl_counts;  ///< blocks per local user, positive, summing to S^d
    std::vector<int> ul_owner;   ///< local user index per uplink block

    [[nodiscard]] bool idle() const { return dl_counts.empty(); }
    [[nodiscard]] std::size_t n_users() const { return dl_counts.size(); }

    /// First downlink block of `local_user`; its range is [first, first + dl_counts[local_user]).
    [[nodiscard]] int dl_first_block(std::size_t local_user) const;
    /// Number of downlink blocks in use (0 for idle).
    [[nodiscard]] int dl_used() const;
    [[nodiscard]] bool uses_dl_block(int block) const { return block < dl_used(); }
    /// Local user transmitting on uplink `block`, or -1.
    [[nodiscard]] int ul_user(int block) const {
        return static_cast<std::size_t>(block) < ul_owner.size() ? ul_owner[static_cast<std::size_t>(block)] : -1;
    }

    friend bool operator==(const Action&, const Action&) = default;
};

}  // namespace vrnet
