#pragma once

#include "rsr/rotation.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace rsr {

class InconsistentState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Face boundaries as treaps with implicit keys: the in-order sequence of
/// each tree is the τ-orbit of one face. Nodes are indexed by halfedge id.
/// Roots identify faces only until the next mutation.
class FaceTracker {
public:
    FaceTracker(std::size_t halfedge_capacity, std::uint64_t seed);

    /// One tree per τ-orbit of the current mesh halfedges.
    static FaceTracker from_rotation_system(const RotationSystem& rs, std::uint64_t seed);

    /// Adds a face whose boundary is `cycle` in τ order.
    void add_face(std::span<const HalfedgeId> cycle);

    bool tracked(HalfedgeId h) const { return h < nodes_.size() && nodes_[h].size != 0; }
    bool same_face(HalfedgeId a, HalfedgeId b) const; // throws UnknownHalfedge
    std::size_t face_size(HalfedgeId h) const;       // throws UnknownHalfedge
    HalfedgeId root(HalfedgeId h) const;              // unchecked
    std::size_t position(HalfedgeId h) const;         // index within its face sequence
    std::size_t face_count() const { return face_count_; }
    std::size_t height(HalfedgeId h) const;

    /// In-order halfedges of the face containing h.
    std::vector<HalfedgeId> sequence(HalfedgeId h) const;

    /// Sizes of the two faces the insertion of (u,v) at corners cu, cv would
    /// create: first the one holding (u,v), then the one holding (v,u).
    std::pair<std::size_t, std::size_t> split_sizes(const Corner& cu, const Corner& cv) const;

    /// Updates the trees after (u,v) = h and its twin were spliced into the
    /// rotation system at corners cu (at u) and cv (at v). The corner
    /// halfedges must lie in one face.
    void split_on_insert(const RotationSystem& rs, HalfedgeId h, const Corner& cu, const Corner& cv);

private:
    struct Node {
        std::uint32_t left = kNil;
        std::uint32_t right = kNil;
        std::uint32_t parent = kNil;
        std::uint32_t size = 0;
        std::uint64_t priority = 0;
    };
    static constexpr std::uint32_t kNil = 0xffffffffu;

    std::uint32_t size_of(std::uint32_t t) const { return t == kNil ? 0 : nodes_[t].size; }
    void pull(std::uint32_t t);
    void make_single(std::uint32_t t);
    std::uint32_t merge(std::uint32_t a, std::uint32_t b);
    std::pair<std::uint32_t, std::uint32_t> split(std::uint32_t t, std::size_t k);
    std::uint32_t detach(std::uint32_t t);
    void check(HalfedgeId h) const;

    std::vector<Node> nodes_;
    std::mt19937_64 rng_;
    std::size_t face_count_ = 0;
};

} // namespace rsr
