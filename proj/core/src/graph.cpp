// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/graph.hpp"

#include <algorithm>

namespace kgate {

namespace {

constexpr std::array<std::string_view, kAllLabels.size()> kLabelNames{
    "Subject", "Biological_Sample", "Disease", "Phenotype", "Gene", "Protein"};

constexpr std::array<std::string_view, kAllEdgeTypes.size()> kEdgeTypeNames{
    "BELONGS_TO_SUBJECT", "HAS_DISEASE", "HAS_DAMAGE", "HAS_PROTEIN", "HAS_PHENOTYPE"};

bool by_neighbor(const Adjacency& a, const Adjacency& b) {
    return std::tie(a.node, a.edge) < std::tie(b.node, b.edge);
}

const std::string* text_property(const Properties& props, std::string_view key) {
    auto it = props.find(key);
    if (it == props.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
}

void check_property_values(const Properties& props) {
    for (const auto& [key, value] : props) {
        if (key.empty()) throw GraphError(GraphErrc::InvalidProperty, "empty property key");
        if (const auto* list = std::get_if<TextList>(&value)) {
            for (const auto& entry : *list) {
                if (entry.empty()) {
                    throw GraphError(GraphErrc::InvalidProperty,
                                     "list property '" + key + "' has an empty entry");
                }
            }
        }
        auto expected = known_property_kind(key);
        if (!expected) continue;
        auto actual = kind_of(value);
        bool numeric_ok = *expected == PropertyKind::Decimal && actual == PropertyKind::Integer;
        if (actual != *expected && !numeric_ok) {
            throw GraphError(GraphErrc::InvalidProperty, "property '" + key + "' has the wrong type");
        }
    }
}

}  // namespace

std::string_view to_string(NodeLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }

std::string_view to_string(EdgeType type) { return kEdgeTypeNames[static_cast<std::size_t>(type)]; }

std::optional<NodeLabel> parse_label(std::string_view text) {
    for (auto label : kAllLabels) {
        if (to_string(label) == text) return label;
    }
    return std::nullopt;
}

std::optional<EdgeType> parse_edge_type(std::string_view text) {
    for (auto type : kAllEdgeTypes) {
        if (to_string(type) == text) return type;
    }
    return std::nullopt;
}

PropertyKind kind_of(const PropertyValue& value) {
    switch (value.index()) {
        case 0: return PropertyKind::Text;
        case 1: return PropertyKind::Integer;
        case 2: return PropertyKind::Decimal;
        default: return PropertyKind::TextList;
    }
}

std::optional<PropertyKind> known_property_kind(std::string_view key) {
    if (key == "subject_id" || key == "name") return PropertyKind::Text;
    if (key == "synonyms") return PropertyKind::TextList;
    if (key == "score") return PropertyKind::Decimal;
    return std::nullopt;
}

bool schema_allows(NodeLabel src, EdgeType type, NodeLabel dst) {
    return std::any_of(kSchemaRules.begin(), kSchemaRules.end(), [&](const SchemaRule& r) {
        return r.src == src && r.type == type && r.dst == dst;
    });
}

bool requires_score(EdgeType type) {
    return type == EdgeType::HasDamage || type == EdgeType::HasProtein;
}

std::string_view to_string(GraphErrc code) {
    switch (code) {
        case GraphErrc::MissingRequiredProperty: return "MissingRequiredProperty";
        case GraphErrc::DuplicateSubjectId: return "DuplicateSubjectId";
        case GraphErrc::InvalidProperty: return "InvalidProperty";
        case GraphErrc::SchemaViolation: return "SchemaViolation";
        case GraphErrc::MissingScore: return "MissingScore";
        case GraphErrc::ScoreOutOfRange: return "ScoreOutOfRange";
        case GraphErrc::UnknownEndpoint: return "UnknownEndpoint";
        case GraphErrc::UnknownNode: return "UnknownNode";
        case GraphErrc::UnknownEdge: return "UnknownEdge";
        case GraphErrc::DuplicateEdge: return "DuplicateEdge";
    }
    return "Unknown";
}

GraphError::GraphError(GraphErrc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

double GraphStats::mean_degree(NodeLabel label, EdgeType type) const {
    auto it = mean_out_degree.find({label, type});
    return it == mean_out_degree.end() ? 0.0 : it->second;
}

std::size_t PropertyGraph::TripleHash::operator()(
    const std::tuple<std::uint64_t, EdgeType, std::uint64_t>& t) const noexcept {
    auto [src, type, dst] = t;
    std::size_t h = std::hash<std::uint64_t>{}(src);
    h ^= std::hash<std::uint64_t>{}(dst) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(type) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

NodeId PropertyGraph::add_node(NodeLabel label, Properties properties) {
    check_property_values(properties);
    if (label == NodeLabel::Subject) {
        const auto* sid = text_property(properties, "subject_id");
        if (sid == nullptr) {
            throw GraphError(GraphErrc::MissingRequiredProperty, "Subject requires subject_id");
        }
        if (subjects_.contains(*sid)) {
            throw GraphError(GraphErrc::DuplicateSubjectId, "subject_id '" + *sid + "' already exists");
        }
    }
    if (label == NodeLabel::Disease && text_property(properties, "name") == nullptr) {
        throw GraphError(GraphErrc::MissingRequiredProperty, "Disease requires name");
    }

    NodeId id{nodes_.size()};
    nodes_.push_back(Node{id, label, std::move(properties)});
    adjacency_.emplace_back();
    index_node(nodes_.back());
    return id;
}

EdgeId PropertyGraph::add_edge(NodeId src, EdgeType type, NodeId dst, Properties properties) {
    if (!contains(src) || !contains(dst)) {
        throw GraphError(GraphErrc::UnknownEndpoint,
                         "edge endpoint " + render_node_id(contains(src) ? dst : src) + " does not exist");
    }
    const auto src_label = nodes_[src.value].label;
    const auto dst_label = nodes_[dst.value].label;
    if (!schema_allows(src_label, type, dst_label)) {
        throw GraphError(GraphErrc::SchemaViolation,
                         "(" + std::string(to_string(src_label)) + ")-[:" + std::string(to_string(type)) +
                             "]->(" + std::string(to_string(dst_label)) + ") is not in the schema");
    }
    check_property_values(properties);
    if (requires_score(type)) {
        auto it = properties.find("score");
        if (it == properties.end()) {
            throw GraphError(GraphErrc::MissingScore, std::string(to_string(type)) + " requires score");
        }
        double score = 0.0;
        if (const auto* d = std::get_if<double>(&it->second)) {
            score = *d;
        } else if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
            score = static_cast<double>(*i);
        } else {
            throw GraphError(GraphErrc::InvalidProperty, "score must be numeric");
        }
        if (!(score >= kScoreMin && score <= kScoreMax)) {
            throw GraphError(GraphErrc::ScoreOutOfRange, "score " + std::to_string(score) + " outside [1, 20]");
        }
    }
    if (triples_.contains({src.value, type, dst.value})) {
        throw GraphError(GraphErrc::DuplicateEdge, "edge " + render_node_id(src) + "-[:" +
                                                       std::string(to_string(type)) + "]->" +
                                                       render_node_id(dst) + " already exists");
    }

    EdgeId id{edges_.size()};
    edges_.push_back(Edge{id, src, dst, type, std::move(properties)});
    index_edge(edges_.back());
    return id;
}

const Node& PropertyGraph::node(NodeId id) const {
    if (!contains(id)) throw GraphError(GraphErrc::UnknownNode, render_node_id(id));
    return nodes_[id.value];
}

const Edge& PropertyGraph::edge(EdgeId id) const {
    if (id.value >= edges_.size()) {
        throw GraphError(GraphErrc::UnknownEdge, "e" + std::to_string(id.value));
    }
    return edges_[id.value];
}

std::span<const NodeId> PropertyGraph::nodes_by_label(NodeLabel label) const {
    return by_label_[static_cast<std::size_t>(label)];
}

std::span<const Adjacency> PropertyGraph::neighbors(NodeId node, EdgeType type, Direction direction) const {
    if (!contains(node)) throw GraphError(GraphErrc::UnknownNode, render_node_id(node));
    return adjacency_[node.value].at(type, direction);
}

std::optional<NodeId> PropertyGraph::find_subject(std::string_view subject_id) const {
    auto it = subjects_.find(std::string(subject_id));
    if (it == subjects_.end()) return std::nullopt;
    return it->second;
}

GraphStats PropertyGraph::stats() const {
    GraphStats s;
    for (auto label : kAllLabels) {
        s.node_counts[static_cast<std::size_t>(label)] = nodes_by_label(label).size();
    }
    for (const auto& e : edges_) ++s.edge_counts[static_cast<std::size_t>(e.type)];
    for (const auto& rule : kSchemaRules) {
        auto sources = nodes_by_label(rule.src);
        std::size_t total = 0;
        for (auto id : sources) total += adjacency_[id.value].at(rule.type, Direction::Out).size();
        s.mean_out_degree[{rule.src, rule.type}] =
            sources.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(sources.size());
    }
    return s;
}

void PropertyGraph::rebuild_indices() {
    for (auto& ids : by_label_) ids.clear();
    adjacency_.assign(nodes_.size(), AdjacencySlots{});
    subjects_.clear();
    triples_.clear();
    for (const auto& n : nodes_) index_node(n);
    for (const auto& e : edges_) index_edge(e);
}

void PropertyGraph::index_node(const Node& node) {
    by_label_[static_cast<std::size_t>(node.label)].push_back(node.id);
    if (node.label == NodeLabel::Subject) {
        subjects_.emplace(*text_property(node.properties, "subject_id"), node.id);
    }
}

void PropertyGraph::index_edge(const Edge& edge) {
    auto insert_sorted = [](std::vector<Adjacency>& rows, Adjacency row) {
        rows.insert(std::upper_bound(rows.begin(), rows.end(), row, by_neighbor), row);
    };
    insert_sorted(adjacency_[edge.src.value].at(edge.type, Direction::Out), {edge.id, edge.dst});
    insert_sorted(adjacency_[edge.dst.value].at(edge.type, Direction::In), {edge.id, edge.src});
    triples_.insert({edge.src.value, edge.type, edge.dst.value});
}

std::string render_node_id(NodeId id) { return "n" + std::to_string(id.value); }

}  // namespace kgate
