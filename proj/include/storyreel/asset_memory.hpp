#pragma once

#include "storyreel/domain.hpp"
#include "storyreel/embedding.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace storyreel {

/// Canonical fields of one table and the only agent allowed to change them.
struct WritePolicy {
    AssetTable table = AssetTable::shot;
    std::set<std::string> canonical_fields;
    std::string owner_agent;
};

/// Ownership derived from each table's producing agent. The character table is split:
/// the Character Designer owns identity fields, the audio agent owns demo_voice.
std::vector<WritePolicy> default_write_policies();

struct ScoredRecord {
    AssetRecord record;
    double similarity = 0.0;
};

/// Text a record is embedded by: its prompt, a shot's description, or a style's tags.
std::string embedding_text(const AssetRecord& record);

/// Versioned, append-only asset tables with single-writer enforcement on canonical fields.
///
/// Every write appends a new immutable version to the (table, id, branch) chain. Rollback
/// and branching copy content forward; nothing is ever truncated. When constructed with a
/// directory, each table is mirrored to `<dir>/<table>.jsonl` (one version per line) and
/// the in-memory index is rebuilt from those logs on open.
class AssetMemory {
public:
    explicit AssetMemory(std::vector<WritePolicy> policies = default_write_policies(),
                         std::size_t embedding_dim = kDefaultEmbeddingDim);
    AssetMemory(const std::filesystem::path& dir, std::vector<WritePolicy> policies = default_write_policies(),
                std::size_t embedding_dim = kDefaultEmbeddingDim);

    AssetMemory(const AssetMemory&) = delete;
    AssetMemory& operator=(const AssetMemory&) = delete;

    /// Throws SchemaMismatch or WriteDenied. Returns the new version number.
    int put(AssetRecord record, std::string_view producer);

    /// Throws NotFound.
    AssetRecord get(AssetTable table, std::string_view id, std::string_view branch = "main",
                    std::optional<int> version = std::nullopt) const;
    std::optional<AssetRecord> find(AssetTable table, std::string_view id,
                                    std::string_view branch = "main") const;

    int rollback(AssetTable table, std::string_view id, std::string_view branch, int to_version);
    void branch(AssetTable table, std::string_view id, std::string_view from_branch, int at_version,
                std::string_view new_branch);

    std::vector<ScoredRecord> query_similar(AssetTable table, std::string_view query_text, std::size_t k) const;
    /// Throws UnknownTable for a name outside the schema.
    std::vector<ScoredRecord> query_similar(std::string_view table, std::string_view query_text,
                                            std::size_t k) const;

    /// Latest version of every id on a branch, ordered by id.
    std::vector<AssetRecord> heads(AssetTable table, std::string_view branch = "main") const;
    /// Every stored version in write order.
    std::vector<AssetRecord> log() const;
    std::size_t version_count() const;

    std::optional<std::string> owner_of(AssetTable table, std::string_view field) const;
    /// Canonical fields whose value differs from `previous` (or is non-empty on a first write).
    std::vector<std::string> touched_canonical_fields(const AssetRecord& record,
                                                      const AssetRecord* previous) const;
    /// Full scan: version contiguity per chain and producer == owner for every touched field.
    std::vector<std::string> audit() const;

    std::size_t embedding_dim() const noexcept { return embedding_dim_; }

private:
    using ChainKey = std::tuple<AssetTable, std::string, std::string>;

    struct Stored {
        AssetRecord record;
        EmbeddingVector embedding;
    };

    void validate_schema(const AssetRecord& record) const;
    void append_locked(AssetRecord record);
    const std::vector<std::size_t>& chain_locked(AssetTable table, std::string_view id,
                                                 std::string_view branch) const;

    std::vector<WritePolicy> policies_;
    std::map<std::pair<AssetTable, std::string>, std::string> owners_;
    std::size_t embedding_dim_;
    std::optional<std::filesystem::path> dir_;

    mutable std::shared_mutex mutex_;
    std::vector<Stored> versions_;                       // write order
    std::map<ChainKey, std::vector<std::size_t>> chains_; // indices into versions_
    std::uint64_t seq_ = 0;
};

/// Read access for one agent execution. Records every asset key it hands out so the
/// director can tell which tasks consumed which assets.
class TrackedReader {
public:
    explicit TrackedReader(const AssetMemory& memory) : memory_(memory) {}

    AssetRecord get(AssetTable table, std::string_view id);
    AssetRecord get(std::string_view key);
    std::optional<AssetRecord> find(AssetTable table, std::string_view id);
    std::optional<AssetRecord> find(std::string_view key);

    const std::set<std::string>& reads() const noexcept { return reads_; }

private:
    const AssetMemory& memory_;
    std::set<std::string> reads_;
};

} // namespace storyreel
