#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsynth/rational.hpp"

namespace bsynth {

using Code = std::vector<std::uint32_t>;
using CodeView = std::span<const std::uint32_t>;

/// Planted rooted trees in the classic child-multiset canonical form.
///
/// A tree is written in preorder as [k, child_1, ..., child_k] where k is the
/// number of children and the child encodings appear in ascending
/// lexicographic order. The encoding is self-delimiting, so lexicographic
/// order on whole codes is a total order and two trees are isomorphic exactly
/// when their codes are equal.
namespace tree {

Code leaf();

/// One past the end of the subtree starting at `pos`.
std::size_t skip(CodeView code, std::size_t pos = 0);

std::vector<Code> children(CodeView code);

/// Sorts the children into canonical order and assembles the parent.
Code join(std::vector<Code> children);

std::uint32_t child_count(CodeView code);

/// Drops every vertex deeper than `depth` below the top vertex.
Code truncate(CodeView code, unsigned depth);

unsigned depth(CodeView code);

std::size_t size(CodeView code);

/// Largest child count of any vertex strictly below the top one.
std::uint32_t max_inner_children(CodeView code);

/// Order of the automorphism group fixing the top vertex.
Integer automorphisms(CodeView code);

/// Well-formed and in canonical order.
bool is_canonical(CodeView code);

}  // namespace tree
}  // namespace bsynth
