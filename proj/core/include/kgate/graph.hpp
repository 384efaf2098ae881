// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace kgate {

enum class NodeLabel : std::uint8_t {
    Subject,
    BiologicalSample,
    Disease,
    Phenotype,
    Gene,
    Protein,
};

enum class EdgeType : std::uint8_t {
    BelongsToSubject,
    HasDisease,
    HasDamage,
    HasProtein,
    HasPhenotype,
};

enum class Direction : std::uint8_t { Out, In };

inline constexpr std::array<NodeLabel, 6> kAllLabels{
    NodeLabel::Subject, NodeLabel::BiologicalSample, NodeLabel::Disease,
    NodeLabel::Phenotype, NodeLabel::Gene, NodeLabel::Protein};

inline constexpr std::array<EdgeType, 5> kAllEdgeTypes{
    EdgeType::BelongsToSubject, EdgeType::HasDisease, EdgeType::HasDamage,
    EdgeType::HasProtein, EdgeType::HasPhenotype};

/// Wire/query spelling of a label, e.g. "Biological_Sample".
std::string_view to_string(NodeLabel label);
/// Wire/query spelling of an edge type, e.g. "HAS_DISEASE".
std::string_view to_string(EdgeType type);
std::optional<NodeLabel> parse_label(std::string_view text);
std::optional<EdgeType> parse_edge_type(std::string_view text);

struct NodeId {
    std::uint64_t value = 0;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct EdgeId {
    std::uint64_t value = 0;
    friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

using TextList = std::vector<std::string>;
using PropertyValue = std::variant<std::string, std::int64_t, double, TextList>;
using Properties = std::map<std::string, PropertyValue, std::less<>>;

enum class PropertyKind : std::uint8_t { Text, Integer, Decimal, TextList };

PropertyKind kind_of(const PropertyValue& value);

/// Types of the property keys the clinical schema defines. Keys outside the
/// catalog are allowed on nodes but carry no static type.
std::optional<PropertyKind> known_property_kind(std::string_view key);

struct SchemaRule {
    NodeLabel src;
    EdgeType type;
    NodeLabel dst;
};

inline constexpr std::array<SchemaRule, 5> kSchemaRules{{
    {NodeLabel::BiologicalSample, EdgeType::BelongsToSubject, NodeLabel::Subject},
    {NodeLabel::BiologicalSample, EdgeType::HasDisease, NodeLabel::Disease},
    {NodeLabel::BiologicalSample, EdgeType::HasDamage, NodeLabel::Gene},
    {NodeLabel::BiologicalSample, EdgeType::HasProtein, NodeLabel::Protein},
    {NodeLabel::BiologicalSample, EdgeType::HasPhenotype, NodeLabel::Phenotype},
}};

bool schema_allows(NodeLabel src, EdgeType type, NodeLabel dst);

/// HAS_DAMAGE and HAS_PROTEIN edges carry a score in [kScoreMin, kScoreMax].
bool requires_score(EdgeType type);
inline constexpr double kScoreMin = 1.0;
inline constexpr double kScoreMax = 20.0;

inline constexpr std::string_view kControlDiseaseName = "control";

struct Node {
    NodeId id;
    NodeLabel label;
    Properties properties;
};

struct Edge {
    EdgeId id;
    NodeId src;
    NodeId dst;
    EdgeType type;
    Properties properties;
};

/// One adjacency row: the edge and the node at its other end.
struct Adjacency {
    EdgeId edge;
    NodeId node;
    friend auto operator<=>(const Adjacency&, const Adjacency&) = default;
};

enum class GraphErrc {
    MissingRequiredProperty,
    DuplicateSubjectId,
    InvalidProperty,
    SchemaViolation,
    MissingScore,
    ScoreOutOfRange,
    UnknownEndpoint,
    UnknownNode,
    UnknownEdge,
    DuplicateEdge,
};

std::string_view to_string(GraphErrc code);

class GraphError : public std::runtime_error {
public:
    GraphError(GraphErrc code, const std::string& detail);
    GraphErrc code() const noexcept { return code_; }

private:
    GraphErrc code_;
};

struct GraphStats {
    std::array<std::size_t, kAllLabels.size()> node_counts{};
    std::array<std::size_t, kAllEdgeTypes.size()> edge_counts{};
    /// Mean out-degree of each schema rule's source label for that edge type.
    std::map<std::pair<NodeLabel, EdgeType>, double> mean_out_degree;

    std::size_t nodes(NodeLabel label) const { return node_counts[static_cast<std::size_t>(label)]; }
    std::size_t edges(EdgeType type) const { return edge_counts[static_cast<std::size_t>(type)]; }
    double mean_degree(NodeLabel label, EdgeType type) const;

    friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// In-memory clinical property graph. Ids are dense and assigned in insertion
/// order, so identical mutation sequences produce identical graphs. The graph
/// is built by a single owner and read concurrently afterwards.
class PropertyGraph {
public:
    NodeId add_node(NodeLabel label, Properties properties);
    EdgeId add_edge(NodeId src, EdgeType type, NodeId dst, Properties properties = {});

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool contains(NodeId id) const { return id.value < nodes_.size(); }

    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;
    std::span<const Node> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }

    /// Ascending ids of every node with `label`.
    std::span<const NodeId> nodes_by_label(NodeLabel label) const;

    /// Rows sorted by (neighbor id, edge id).
    std::span<const Adjacency> neighbors(NodeId node, EdgeType type, Direction direction) const;

    std::optional<NodeId> find_subject(std::string_view subject_id) const;

    GraphStats stats() const;

    /// Discards and recomputes every index from the raw node and edge sets.
    void rebuild_indices();

private:
    struct AdjacencySlots {
        std::array<std::vector<Adjacency>, kAllEdgeTypes.size() * 2> rows;
        std::vector<Adjacency>& at(EdgeType type, Direction dir) {
            return rows[static_cast<std::size_t>(type) * 2 + static_cast<std::size_t>(dir)];
        }
        const std::vector<Adjacency>& at(EdgeType type, Direction dir) const {
            return rows[static_cast<std::size_t>(type) * 2 + static_cast<std::size_t>(dir)];
        }
    };

    struct TripleHash {
        std::size_t operator()(const std::tuple<std::uint64_t, EdgeType, std::uint64_t>& t) const noexcept;
    };

    void index_node(const Node& node);
    void index_edge(const Edge& edge);

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::array<std::vector<NodeId>, kAllLabels.size()> by_label_;
    std::vector<AdjacencySlots> adjacency_;
    std::unordered_map<std::string, NodeId> subjects_;
    std::unordered_set<std::tuple<std::uint64_t, EdgeType, std::uint64_t>, TripleHash> triples_;
};

/// "n<id>", the rendering used when node ids appear in text.
std::string render_node_id(NodeId id);

}  // namespace kgate
