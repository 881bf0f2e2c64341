#include "bsynth/tree_code.hpp"

#include <algorithm>
#include <map>

#include "bsynth/error.hpp"

namespace bsynth::tree {

Code leaf() { return Code{0}; }

std::size_t skip(CodeView code, std::size_t pos) {
    if (pos >= code.size()) throw Error(ErrorKind::ParseError, "truncated tree code");
    std::uint32_t k = code[pos++];
    for (std::uint32_t i = 0; i < k; ++i) pos = skip(code, pos);
    return pos;
}

std::vector<Code> children(CodeView code) {
    std::vector<Code> out;
    std::uint32_t k = code[0];
    out.reserve(k);
    std::size_t pos = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::size_t end = skip(code, pos);
        out.emplace_back(code.begin() + pos, code.begin() + end);
        pos = end;
    }
    return out;
}

Code join(std::vector<Code> kids) {
    std::sort(kids.begin(), kids.end());
    Code out;
    out.push_back(static_cast<std::uint32_t>(kids.size()));
    for (const auto& c : kids) out.insert(out.end(), c.begin(), c.end());
    return out;
}

std::uint32_t child_count(CodeView code) { return code[0]; }

Code truncate(CodeView code, unsigned depth) {
    if (depth == 0) return leaf();
    std::vector<Code> kids;
    for (const auto& c : children(code)) kids.push_back(truncate(c, depth - 1));
    return join(std::move(kids));
}

unsigned depth(CodeView code) {
    unsigned best = 0;
    for (const auto& c : children(code)) best = std::max(best, depth(c) + 1);
    return best;
}

std::size_t size(CodeView code) {
    // Every entry of the preorder code is one vertex.
    return code.size();
}

std::uint32_t max_inner_children(CodeView code) {
    std::uint32_t best = 0;
    for (const auto& c : children(code)) {
        best = std::max({best, child_count(c), max_inner_children(c)});
    }
    return best;
}

Integer automorphisms(CodeView code) {
    Integer out = 1;
    std::map<Code, unsigned> classes;
    for (auto& c : children(code)) {
        out *= automorphisms(c);
        ++classes[std::move(c)];
    }
    for (const auto& [c, m] : classes) out *= factorial(m);
    return out;
}

namespace {

bool canonical_at(CodeView code, std::size_t& pos) {
    if (pos >= code.size()) return false;
    std::uint32_t k = code[pos++];
    if (k > code.size()) return false;
    std::size_t prev_begin = 0, prev_end = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::size_t begin = pos;
        if (!canonical_at(code, pos)) return false;
        if (i > 0) {
            auto prev = code.subspan(prev_begin, prev_end - prev_begin);
            auto cur = code.subspan(begin, pos - begin);
            if (std::lexicographical_compare(cur.begin(), cur.end(), prev.begin(), prev.end())) {
                return false;
            }
        }
        prev_begin = begin;
        prev_end = pos;
    }
    return true;
}

}  // namespace

bool is_canonical(CodeView code) {
    std::size_t pos = 0;
    return canonical_at(code, pos) && pos == code.size();
}

}  // namespace bsynth::tree
