#include "rsr/faces.hpp"

namespace rsr {

FaceTracker::FaceTracker(std::size_t halfedge_capacity, std::uint64_t seed) : nodes_(halfedge_capacity), rng_(seed)
{
}

FaceTracker FaceTracker::from_rotation_system(const RotationSystem& rs, std::uint64_t seed)
{
    FaceTracker ft(rs.graph().targets.size(), seed);
    std::vector<char> seen(rs.graph().targets.size(), 0);
    for (HalfedgeId h = 0; h < seen.size(); ++h) {
        if (!rs.in_mesh(h) || seen[h]) {
            continue;
        }
        const auto cycle = rs.orbit(h);
        for (HalfedgeId x : cycle) {
            seen[x] = 1;
        }
        ft.add_face(cycle);
    }
    return ft;
}

void FaceTracker::pull(std::uint32_t t)
{
    Node& n = nodes_[t];
    n.size = 1 + size_of(n.left) + size_of(n.right);
    if (n.left != kNil) {
        nodes_[n.left].parent = t;
    }
    if (n.right != kNil) {
        nodes_[n.right].parent = t;
    }
}

void FaceTracker::make_single(std::uint32_t t)
{
    nodes_[t] = Node{kNil, kNil, kNil, 1, rng_()};
}

std::uint32_t FaceTracker::merge(std::uint32_t a, std::uint32_t b)
{
    if (a == kNil) {
        return b;
    }
    if (b == kNil) {
        return a;
    }
    if (nodes_[a].priority > nodes_[b].priority) {
        nodes_[a].right = merge(nodes_[a].right, b);
        pull(a);
        return a;
    }
    nodes_[b].left = merge(a, nodes_[b].left);
    pull(b);
    return b;
}

// First k nodes in order go left.
std::pair<std::uint32_t, std::uint32_t> FaceTracker::split(std::uint32_t t, std::size_t k)
{
    if (t == kNil) {
        return {kNil, kNil};
    }
    Node& n = nodes_[t];
    const std::size_t ls = size_of(n.left);
    if (k <= ls) {
        const auto [l, r] = split(n.left, k);
        nodes_[t].left = r;
        pull(t);
        return {l, t};
    }
    const auto [l, r] = split(n.right, k - ls - 1);
    nodes_[t].right = l;
    pull(t);
    return {t, r};
}

std::uint32_t FaceTracker::detach(std::uint32_t t)
{
    if (t != kNil) {
        nodes_[t].parent = kNil;
    }
    return t;
}

void FaceTracker::add_face(std::span<const HalfedgeId> cycle)
{
    std::uint32_t r = kNil;
    for (HalfedgeId h : cycle) {
        make_single(h);
        r = merge(r, h);
    }
    detach(r);
    if (r != kNil) {
        ++face_count_;
    }
}

void FaceTracker::check(HalfedgeId h) const
{
    if (!tracked(h)) {
        throw UnknownHalfedge();
    }
}

HalfedgeId FaceTracker::root(HalfedgeId h) const
{
    while (nodes_[h].parent != kNil) {
        h = nodes_[h].parent;
    }
    return h;
}

bool FaceTracker::same_face(HalfedgeId a, HalfedgeId b) const
{
    check(a);
    check(b);
    return root(a) == root(b);
}

std::size_t FaceTracker::face_size(HalfedgeId h) const
{
    check(h);
    return nodes_[root(h)].size;
}

std::size_t FaceTracker::position(HalfedgeId h) const
{
    std::size_t idx = size_of(nodes_[h].left);
    while (nodes_[h].parent != kNil) {
        const std::uint32_t p = nodes_[h].parent;
        if (nodes_[p].right == h) {
            idx += size_of(nodes_[p].left) + 1;
        }
        h = p;
    }
    return idx;
}

std::size_t FaceTracker::height(HalfedgeId h) const
{
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root(h), 1}};
    while (!stack.empty()) {
        const auto [t, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes_[t].left != kNil) {
            stack.emplace_back(nodes_[t].left, d + 1);
        }
        if (nodes_[t].right != kNil) {
            stack.emplace_back(nodes_[t].right, d + 1);
        }
    }
    return best;
}

std::vector<HalfedgeId> FaceTracker::sequence(HalfedgeId h) const
{
    check(h);
    std::vector<HalfedgeId> out;
    std::vector<std::uint32_t> stack;
    std::uint32_t t = root(h);
    while (t != kNil || !stack.empty()) {
        while (t != kNil) {
            stack.push_back(t);
            t = nodes_[t].left;
        }
        t = stack.back();
        stack.pop_back();
        out.push_back(t);
        t = nodes_[t].right;
    }
    return out;
}

std::pair<std::size_t, std::size_t> FaceTracker::split_sizes(const Corner& cu, const Corner& cv) const
{
    const std::size_t m = face_size(cu.h_next);
    const std::size_t pa = position(cu.h_next);
    const std::size_t pb = position(cv.h_next);
    const std::size_t seg_a = (pa + m - pb) % m; // b_next .. iota(a_prev)
    const std::size_t seg_b = (pb + m - pa) % m; // a_next .. iota(b_prev)
    return {seg_a + 1, seg_b + 1};
}

void FaceTracker::split_on_insert(const RotationSystem& rs, HalfedgeId h, const Corner& cu, const Corner& cv)
{
    const HalfedgeId t = rs.iota(h);
    const HalfedgeId a_next = cu.h_next;
    const HalfedgeId b_next = cv.h_next;
    check(a_next);
    check(b_next);
    const std::uint32_t r = root(a_next);
    if (root(b_next) != r || a_next == b_next) {
        throw InconsistentState("insertion corners are not on one face");
    }
    const std::size_t pa = position(a_next);
    const std::size_t pb = position(b_next);

    make_single(h);
    make_single(t);
    std::uint32_t face_a = kNil; // holds h = (u,v)
    std::uint32_t face_b = kNil; // holds t = (v,u)
    if (pa < pb) {
        const auto [left, rest] = split(r, pa);
        const auto [mid, right] = split(detach(rest), pb - pa);
        face_b = merge(detach(mid), t);
        face_a = merge(merge(detach(right), detach(left)), h);
    } else {
        const auto [left, rest] = split(r, pb);
        const auto [mid, right] = split(detach(rest), pa - pb);
        face_a = merge(detach(mid), h);
        face_b = merge(merge(detach(right), detach(left)), t);
    }
    detach(face_a);
    detach(face_b);
    ++face_count_;
}

} // namespace rsr
