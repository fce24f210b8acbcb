#include "cogload/datastore.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "cogload/errors.hpp"
#include "cogload/metrics.hpp"
#include "cogload/text.hpp"

namespace cogload::store {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Questions: return "questions";
        case DatasetKind::CarrierSongs: return "carrier_songs";
        case DatasetKind::MtBenchmark: return "mt_benchmark";
    }
    return "?";
}

DatasetKind dataset_kind_from_string(const std::string& name) {
    if (name == "questions") return DatasetKind::Questions;
    if (name == "carrier_songs") return DatasetKind::CarrierSongs;
    if (name == "mt_benchmark") return DatasetKind::MtBenchmark;
    raise(ErrorCode::UsageError, "unknown dataset kind: " + name);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                   nullptr) != 1) {
        raise(ErrorCode::IoError, "sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

namespace {

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_json_or(const std::string& payload, ErrorCode code,
                   const std::string& what) {
    json parsed = json::parse(payload, nullptr, false);
    if (parsed.is_discarded()) raise(code, what);
    return parsed;
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path) {
    json manifest = parse_json_or(read_file_bytes(manifest_path),
                                  ErrorCode::IoError,
                                  "manifest is not valid JSON: " + manifest_path);

    Dataset dataset;
    dataset.id = manifest.value("id", fs::path(manifest_path).stem().string());
    dataset.kind = dataset_kind_from_string(manifest.value("kind", "questions"));

    fs::path source = manifest.value("source", "");
    if (source.is_relative()) {
        source = fs::path(manifest_path).parent_path() / source;
    }
    dataset.source_path = source.string();

    std::string bytes = read_file_bytes(dataset.source_path);
    dataset.content_hash = sha256_hex(bytes);
    std::string expected = manifest.value("sha256", "");
    if (expected.empty()) {
        raise(ErrorCode::IntegrityError, "manifest has no sha256: " + manifest_path);
    }
    if (dataset.content_hash != expected) {
        raise(ErrorCode::IntegrityError,
              "hash mismatch for " + dataset.source_path + " (expected " + expected +
                  ", got " + dataset.content_hash + ")");
    }

    std::set<std::string> excluded;
    const json excluded_list = manifest.value("exclude_categories", json::array());
    for (const auto& category : excluded_list) {
        excluded.insert(category.get<std::string>());
    }

    std::set<std::string> seen_ids;
    for (const auto& line : text::split_lines(bytes)) {
        if (text::trim(line).empty()) continue;
        json item = parse_json_or(line, ErrorCode::IntegrityError,
                                  "bad dataset line in " + dataset.source_path);
        DatasetItem parsed;
        parsed.item_id = item.value("id", "");
        parsed.text = item.value("text", "");
        parsed.category = item.value("category", "");
        if (parsed.item_id.empty() || parsed.text.empty()) {
            raise(ErrorCode::IntegrityError,
                  "dataset item missing id/text in " + dataset.source_path);
        }
        if (!seen_ids.insert(parsed.item_id).second) {
            raise(ErrorCode::IntegrityError,
                  "duplicate item id: " + parsed.item_id);
        }
        if (excluded.count(parsed.category)) continue;
        dataset.items.push_back(std::move(parsed));
    }
    if (dataset.items.empty()) {
        raise(ErrorCode::EmptyDataset, "no items left after category filtering");
    }
    return dataset;
}

// ---------------------------------------------------------------------------
// Ledger

std::string_view to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::AttackRecord: return "attack_record";
        case EntryKind::JudgeVerdict: return "judge_verdict";
        case EntryKind::MeasurementScore: return "measurement_score";
        case EntryKind::CampaignEvent: return "campaign_event";
    }
    return "?";
}

EntryKind entry_kind_from_string(const std::string& name) {
    if (name == "attack_record") return EntryKind::AttackRecord;
    if (name == "judge_verdict") return EntryKind::JudgeVerdict;
    if (name == "measurement_score") return EntryKind::MeasurementScore;
    if (name == "campaign_event") return EntryKind::CampaignEvent;
    raise(ErrorCode::LedgerCorrupt, "unknown entry kind: " + name);
}

Ledger::Ledger(std::string path) : path_(std::move(path)) {
    if (fs::path(path_).has_parent_path()) {
        fs::create_directories(fs::path(path_).parent_path());
    }
    for (const auto& entry : read_all()) {
        next_seq_ = std::max(next_seq_, entry.seq + 1);
    }
}

std::uint64_t Ledger::append(EntryKind kind, const std::string& payload_json) {
    LedgerEntry entry;
    entry.kind = kind;
    entry.payload_json = payload_json;
    return append(std::move(entry));
}

std::uint64_t Ledger::append(LedgerEntry entry) {
    if (entry.schema_version != kLedgerSchemaVersion) {
        raise(ErrorCode::SchemaVersion,
              "unsupported ledger schema_version " +
                  std::to_string(entry.schema_version));
    }
    json payload = parse_json_or(entry.payload_json, ErrorCode::UsageError,
                                 "ledger payload is not valid JSON");

    std::lock_guard lock(write_mutex_);
    entry.seq = next_seq_;
    if (entry.timestamp.empty()) entry.timestamp = text::utc_timestamp();

    json line = {{"schema_version", entry.schema_version},
                 {"seq", entry.seq},
                 {"ts", entry.timestamp},
                 {"kind", std::string(to_string(entry.kind))},
                 {"payload", payload}};
    std::string serialized = line.dump();
    serialized += '\n';

    FILE* out = std::fopen(path_.c_str(), "ab");
    if (!out) raise(ErrorCode::IoError, "cannot open ledger for append: " + path_);
    bool ok = std::fwrite(serialized.data(), 1, serialized.size(), out) ==
              serialized.size();
    ok = std::fflush(out) == 0 && ok;
    if (ok) fsync(fileno(out));
    std::fclose(out);
    if (!ok) raise(ErrorCode::IoError, "short write to ledger: " + path_);

    return next_seq_++;
}

std::vector<LedgerEntry> Ledger::read_file(const std::string& path) {
    std::vector<LedgerEntry> entries;
    std::ifstream in(path, std::ios::binary);
    if (!in) return entries;
    std::string line;
    std::uint64_t previous_seq = 0;
    bool pending_corruption = false;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        // A malformed line is tolerated only as the file's last line (a
        // crash mid-append); anywhere else the ledger is corrupt.
        if (pending_corruption) {
            raise(ErrorCode::LedgerCorrupt, "malformed line mid-ledger in " + path);
        }
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            pending_corruption = true;
            continue;
        }
        LedgerEntry entry;
        entry.schema_version = parsed.value("schema_version", 0);
        if (entry.schema_version != kLedgerSchemaVersion) {
            raise(ErrorCode::SchemaVersion, "unsupported entry version in " + path);
        }
        entry.seq = parsed.value("seq", 0ULL);
        entry.timestamp = parsed.value("ts", "");
        entry.kind = entry_kind_from_string(parsed.value("kind", ""));
        entry.payload_json = parsed["payload"].dump();
        if (entry.seq <= previous_seq) {
            raise(ErrorCode::LedgerCorrupt,
                  "sequence numbers not strictly increasing in " + path);
        }
        previous_seq = entry.seq;
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<LedgerEntry> Ledger::read_all() const {
    return read_file(path_);
}

// ---------------------------------------------------------------------------
// Report export

namespace {

struct AttackRow {
    std::string target;
    std::string judge;
    std::map<std::string, std::size_t> per_level;  // level label -> successes
    std::size_t total_questions = 0;
    std::vector<std::string> level_order;
    bool has_records = false;
};

std::string format_pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", value);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string title;
};

std::string render_csv(const std::vector<Table>& tables) {
    std::ostringstream out;
    for (const auto& table : tables) {
        auto quote = [](const std::string& cell) {
            if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
            std::string quoted = "\"";
            for (char c : cell) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            return quoted;
        };
        out << "# " << table.title << "\n";
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (i) out << ',';
            out << quote(table.header[i]);
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                out << quote(row[i]);
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

std::string render_markdown(const std::vector<Table>& tables) {
    std::ostringstream out;
    for (const auto& table : tables) {
        out << "## " << table.title << "\n\n";
        out << '|';
        for (const auto& cell : table.header) out << ' ' << cell << " |";
        out << "\n|";
        for (std::size_t i = 0; i < table.header.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& row : table.rows) {
            out << '|';
            for (const auto& cell : row) out << ' ' << cell << " |";
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string export_report(const std::vector<LedgerEntry>& entries,
                          ReportFormat format) {
    std::map<std::string, AttackRow> attack_rows;
    // level label -> (sum of scores, count)
    std::map<std::string, std::pair<double, std::size_t>> measurement;
    std::vector<std::string> measurement_order;

    for (const auto& entry : entries) {
        json payload = parse_json_or(entry.payload_json, ErrorCode::LedgerCorrupt,
                                     "unreadable payload");
        if (entry.kind == EntryKind::CampaignEvent &&
            payload.value("event", "") == "campaign_started") {
            auto& row = attack_rows[payload.value("target", "?")];
            row.target = payload.value("target", "?");
            row.judge = payload.value("judge", "?");
            row.total_questions = payload.value("total_questions", 0u);
            row.level_order.clear();
            const json level_list = payload.value("levels", json::array());
            for (const auto& level : level_list) {
                row.level_order.push_back(level.get<std::string>());
                row.per_level.emplace(level.get<std::string>(), 0);
            }
        } else if (entry.kind == EntryKind::AttackRecord) {
            auto& row = attack_rows[payload.value("target", "?")];
            row.has_records = true;
            if (row.target.empty()) row.target = payload.value("target", "?");
            if (row.judge.empty()) row.judge = payload.value("judge", "?");
            std::string level = payload.value("level", "?");
            if (std::find(row.level_order.begin(), row.level_order.end(), level) ==
                row.level_order.end()) {
                row.level_order.push_back(level);
                row.per_level.emplace(level, 0);
            }
            if (payload.value("success", false)) ++row.per_level[level];
        } else if (entry.kind == EntryKind::MeasurementScore) {
            std::string level = payload.value("level", "?");
            auto [it, inserted] = measurement.try_emplace(level, 0.0, 0);
            it->second.first += payload.value("score", 0.0);
            it->second.second += 1;
            if (inserted) measurement_order.push_back(level);
        }
    }

    std::vector<Table> tables;

    bool any_records = false;
    for (auto& [_, row] : attack_rows) any_records |= row.has_records;
    if (any_records) {
        // Union of level columns, preserving campaign order.
        std::vector<std::string> levels;
        for (const auto& [_, row] : attack_rows) {
            for (const auto& level : row.level_order) {
                if (std::find(levels.begin(), levels.end(), level) == levels.end()) {
                    levels.push_back(level);
                }
            }
        }
        Table table;
        table.title = "Attack success by load level";
        table.header = {"Model"};
        for (const auto& level : levels) table.header.push_back(level);
        table.header.insert(table.header.end(), {"Total", "ASR", "Judge LLM"});
        for (const auto& [_, row] : attack_rows) {
            std::size_t total = 0;
            std::vector<std::string> cells = {row.target};
            for (const auto& level : levels) {
                auto it = row.per_level.find(level);
                std::size_t count = it == row.per_level.end() ? 0 : it->second;
                total += count;
                cells.push_back(std::to_string(count));
            }
            cells.push_back(std::to_string(total));
            if (row.total_questions > 0) {
                cells.push_back(format_pct(
                    metrics::round2(100.0 * static_cast<double>(total) /
                                    static_cast<double>(row.total_questions))));
            } else {
                cells.push_back("n/a");
            }
            cells.push_back(row.judge);
            table.rows.push_back(std::move(cells));
        }
        tables.push_back(std::move(table));
    }

    if (!measurement.empty()) {
        Table table;
        table.title = "Mean pairwise score by load level";
        table.header = {"Level", "Mean score", "Samples"};
        for (const auto& level : measurement_order) {
            const auto& [sum, count] = measurement.at(level);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f",
                          metrics::round2(sum / static_cast<double>(count)));
            table.rows.push_back({level, buf, std::to_string(count)});
        }
        tables.push_back(std::move(table));
    }

    if (tables.empty()) {
        raise(ErrorCode::EmptyInput, "ledger has nothing to tabulate");
    }
    return format == ReportFormat::Csv ? render_csv(tables)
                                       : render_markdown(tables);
}

}  // namespace cogload::store
