#include "storyreel/asset_memory.hpp"

#include "storyreel/errors.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

namespace storyreel {

namespace {

std::string describe(AssetTable table, std::string_view id, std::string_view branch) {
    return std::string(to_string(table)) + "/" + std::string(id) + "@" + std::string(branch);
}

const std::string& field_or_empty(const AssetRecord& r, const std::string& field) {
    static const std::string empty;
    auto it = r.key_fields.find(field);
    return it == r.key_fields.end() ? empty : it->second;
}

} // namespace

std::vector<WritePolicy> default_write_policies() {
    const std::string director(agents::kDirector);
    return {
        {AssetTable::shot, {"description"}, director},
        {AssetTable::style, {"visual_style", "acoustic_style"}, director},
        {AssetTable::scene, {"prompt", "view_3d"}, std::string(agents::kSceneDesigner)},
        {AssetTable::character, {"prompt", "voice_prompt", "3d_view"}, std::string(agents::kCharacterDesigner)},
        {AssetTable::character, {"demo_voice"}, std::string(agents::kAudio)},
        {AssetTable::storyboard, {"prompt", "image_path"}, std::string(agents::kStoryboard)},
        {AssetTable::video, {"prompt", "video_path", "shot_id", "music_id"}, std::string(agents::kAnimator)},
        {AssetTable::music, {"character_id", "prompt", "music_path"}, std::string(agents::kAudio)},
    };
}

std::string embedding_text(const AssetRecord& record) {
    if (auto it = record.key_fields.find("prompt"); it != record.key_fields.end()) return it->second;
    if (auto it = record.key_fields.find("description"); it != record.key_fields.end()) return it->second;
    return field_or_empty(record, "visual_style") + " " + field_or_empty(record, "acoustic_style");
}

AssetMemory::AssetMemory(std::vector<WritePolicy> policies, std::size_t embedding_dim)
    : policies_(std::move(policies)), embedding_dim_(embedding_dim) {
    for (const auto& p : policies_) {
        const auto& columns = table_columns(p.table);
        for (const auto& f : p.canonical_fields) {
            if (std::find(columns.begin(), columns.end(), f) == columns.end())
                throw ConfigError("write policy names unknown field " + std::string(to_string(p.table)) + "." + f);
            if (!owners_.emplace(std::make_pair(p.table, f), p.owner_agent).second)
                throw ConfigError("field " + std::string(to_string(p.table)) + "." + f + " has more than one owner");
        }
    }
}

AssetMemory::AssetMemory(const std::filesystem::path& dir, std::vector<WritePolicy> policies,
                         std::size_t embedding_dim)
    : AssetMemory(std::move(policies), embedding_dim) {
    std::filesystem::create_directories(dir);
    std::vector<AssetRecord> loaded;
    for (AssetTable t : kAllTables) {
        std::ifstream in(dir / (std::string(to_string(t)) + ".jsonl"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                loaded.push_back(json::parse(line).get<AssetRecord>());
            } catch (const json::exception& e) {
                throw ParseError("corrupt asset log for table " + std::string(to_string(t)) + ": " + e.what());
            }
        }
    }
    std::sort(loaded.begin(), loaded.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
    for (auto& r : loaded) {
        seq_ = std::max(seq_, r.seq);
        auto& chain = chains_[{r.table, r.id(), r.branch}];
        chain.push_back(versions_.size());
        auto e = embed(embedding_text(r), embedding_dim_);
        versions_.push_back({std::move(r), std::move(e)});
    }
    dir_ = dir;
}

void AssetMemory::validate_schema(const AssetRecord& record) const {
    const auto& columns = table_columns(record.table);
    for (const auto& c : columns)
        if (!record.key_fields.count(c))
            throw SchemaMismatch("table " + std::string(to_string(record.table)) + " requires field '" + c + "'");
    for (const auto& [name, value] : record.key_fields)
        if (std::find(columns.begin(), columns.end(), name) == columns.end())
            throw SchemaMismatch("table " + std::string(to_string(record.table)) + " has no field '" + name + "'");
    if (record.id().empty()) throw SchemaMismatch("record id must not be empty");
    if (record.branch.empty()) throw SchemaMismatch("record branch must not be empty");
}

std::optional<std::string> AssetMemory::owner_of(AssetTable table, std::string_view field) const {
    auto it = owners_.find({table, std::string(field)});
    if (it == owners_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> AssetMemory::touched_canonical_fields(const AssetRecord& record,
                                                               const AssetRecord* previous) const {
    std::vector<std::string> touched;
    for (const auto& [name, value] : record.key_fields) {
        if (!owners_.count({record.table, name})) continue;
        const bool changed = previous ? field_or_empty(*previous, name) != value : !value.empty();
        if (changed) touched.push_back(name);
    }
    return touched;
}

void AssetMemory::append_locked(AssetRecord record) {
    record.seq = ++seq_;
    if (dir_) {
        std::ofstream out(*dir_ / (std::string(to_string(record.table)) + ".jsonl"), std::ios::app);
        out << json(record).dump() << '\n';
        if (!out) throw Error("failed to append to asset log in " + dir_->string());
    }
    auto& chain = chains_[{record.table, record.id(), record.branch}];
    chain.push_back(versions_.size());
    auto e = embed(embedding_text(record), embedding_dim_);
    versions_.push_back({std::move(record), std::move(e)});
}

const std::vector<std::size_t>& AssetMemory::chain_locked(AssetTable table, std::string_view id,
                                                          std::string_view branch) const {
    static const std::vector<std::size_t> empty;
    auto it = chains_.find({table, std::string(id), std::string(branch)});
    return it == chains_.end() ? empty : it->second;
}

int AssetMemory::put(AssetRecord record, std::string_view producer) {
    validate_schema(record);
    std::unique_lock lock(mutex_);
    const auto& chain = chain_locked(record.table, record.id(), record.branch);
    const AssetRecord* previous = chain.empty() ? nullptr : &versions_[chain.back()].record;
    for (const auto& field : touched_canonical_fields(record, previous)) {
        const auto& owner = owners_.at({record.table, field});
        if (owner != producer)
            throw WriteDenied("agent " + std::string(producer) + " may not write canonical field " +
                              std::string(to_string(record.table)) + "." + field + " (owned by " + owner + ")");
    }
    record.version = previous ? previous->version + 1 : 1;
    record.producer = std::string(producer);
    record.origin.clear();
    const int version = record.version;
    append_locked(std::move(record));
    return version;
}

AssetRecord AssetMemory::get(AssetTable table, std::string_view id, std::string_view branch,
                             std::optional<int> version) const {
    std::shared_lock lock(mutex_);
    const auto& chain = chain_locked(table, id, branch);
    if (chain.empty()) throw NotFound("no asset " + describe(table, id, branch));
    if (!version) return versions_[chain.back()].record;
    if (*version < 1 || static_cast<std::size_t>(*version) > chain.size())
        throw NotFound("no version " + std::to_string(*version) + " of " + describe(table, id, branch));
    return versions_[chain[static_cast<std::size_t>(*version - 1)]].record;
}

std::optional<AssetRecord> AssetMemory::find(AssetTable table, std::string_view id, std::string_view branch) const {
    std::shared_lock lock(mutex_);
    const auto& chain = chain_locked(table, id, branch);
    if (chain.empty()) return std::nullopt;
    return versions_[chain.back()].record;
}

int AssetMemory::rollback(AssetTable table, std::string_view id, std::string_view branch, int to_version) {
    std::unique_lock lock(mutex_);
    const auto& chain = chain_locked(table, id, branch);
    if (to_version < 1 || static_cast<std::size_t>(to_version) > chain.size())
        throw NotFound("no version " + std::to_string(to_version) + " of " + describe(table, id, branch));
    AssetRecord copy = versions_[chain[static_cast<std::size_t>(to_version - 1)]].record;
    copy.version = static_cast<int>(chain.size()) + 1;
    copy.origin = "rollback:" + std::to_string(to_version);
    const int version = copy.version;
    append_locked(std::move(copy));
    return version;
}

void AssetMemory::branch(AssetTable table, std::string_view id, std::string_view from_branch, int at_version,
                         std::string_view new_branch) {
    std::unique_lock lock(mutex_);
    const auto& source = chain_locked(table, id, from_branch);
    if (at_version < 1 || static_cast<std::size_t>(at_version) > source.size())
        throw NotFound("no version " + std::to_string(at_version) + " of " + describe(table, id, from_branch));
    if (!chain_locked(table, id, new_branch).empty())
        throw BranchExists("branch already exists: " + describe(table, id, new_branch));
    if (new_branch.empty()) throw BranchExists("branch name must not be empty");
    AssetRecord copy = versions_[source[static_cast<std::size_t>(at_version - 1)]].record;
    copy.version = 1;
    copy.branch = std::string(new_branch);
    copy.origin = "branch:" + std::string(from_branch) + "@" + std::to_string(at_version);
    append_locked(std::move(copy));
}

std::vector<ScoredRecord> AssetMemory::query_similar(AssetTable table, std::string_view query_text,
                                                     std::size_t k) const {
    if (k < 1) throw ContractViolation("query_similar requires k >= 1");
    const auto query = embed(query_text, embedding_dim_);
    std::vector<std::pair<const Stored*, double>> scored;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [key, chain] : chains_) {
            if (std::get<0>(key) != table || std::get<2>(key) != "main") continue;
            const auto& head = versions_[chain.back()];
            scored.emplace_back(&head, cosine(query, head.embedding));
        }
        const auto n = std::min(k, scored.size());
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                          [](const auto& a, const auto& b) {
                              if (a.second != b.second) return a.second > b.second;
                              return a.first->record.id() < b.first->record.id();
                          });
        scored.resize(n);
        std::vector<ScoredRecord> out;
        out.reserve(n);
        for (const auto& [stored, sim] : scored) out.push_back({stored->record, sim});
        return out;
    }
}

std::vector<ScoredRecord> AssetMemory::query_similar(std::string_view table, std::string_view query_text,
                                                     std::size_t k) const {
    auto t = parse_table(table);
    if (!t) throw UnknownTable("unknown table '" + std::string(table) + "'");
    return query_similar(*t, query_text, k);
}

std::vector<AssetRecord> AssetMemory::heads(AssetTable table, std::string_view branch) const {
    std::shared_lock lock(mutex_);
    std::vector<AssetRecord> out;
    for (const auto& [key, chain] : chains_)
        if (std::get<0>(key) == table && std::get<2>(key) == branch) out.push_back(versions_[chain.back()].record);
    return out;
}

std::vector<AssetRecord> AssetMemory::log() const {
    std::shared_lock lock(mutex_);
    std::vector<AssetRecord> out;
    out.reserve(versions_.size());
    for (const auto& s : versions_) out.push_back(s.record);
    return out;
}

std::size_t AssetMemory::version_count() const {
    std::shared_lock lock(mutex_);
    return versions_.size();
}

std::vector<std::string> AssetMemory::audit() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [key, chain] : chains_) {
        const AssetRecord* previous = nullptr;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const auto& r = versions_[chain[i]].record;
            const auto where = describe(r.table, r.id(), r.branch) + " v" + std::to_string(r.version);
            if (r.version != static_cast<int>(i) + 1) out.push_back(where + ": version out of sequence");
            if (r.origin.empty()) {
                for (const auto& field : touched_canonical_fields(r, previous)) {
                    const auto& owner = owners_.at({r.table, field});
                    if (owner != r.producer)
                        out.push_back(where + ": " + field + " written by " + r.producer + ", owner " + owner);
                }
            }
            previous = &r;
        }
    }
    return out;
}

AssetRecord TrackedReader::get(AssetTable table, std::string_view id) {
    auto r = memory_.get(table, id);
    reads_.insert(r.key());
    return r;
}

AssetRecord TrackedReader::get(std::string_view key) {
    auto [table, id] = split_asset_key(key);
    return get(table, id);
}

std::optional<AssetRecord> TrackedReader::find(AssetTable table, std::string_view id) {
    auto r = memory_.find(table, id);
    if (r) reads_.insert(r->key());
    return r;
}

std::optional<AssetRecord> TrackedReader::find(std::string_view key) {
    auto [table, id] = split_asset_key(key);
    return find(table, id);
}

} // namespace storyreel
