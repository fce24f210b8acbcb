#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cogload::store {

enum class DatasetKind { Questions, CarrierSongs, MtBenchmark };

std::string_view to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& name);

struct DatasetItem {
    std::string item_id;
    std::string text;
    std::string category;
};

struct Dataset {
    std::string id;
    DatasetKind kind = DatasetKind::Questions;
    std::vector<DatasetItem> items;
    std::string source_path;
    std::string content_hash;  // sha256 of the source file bytes
};

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// Loads a dataset through its manifest: a JSON file naming the source
/// JSONL ({"id","text","category"} per line), its sha256, and the
/// categories to drop. Errors: IntegrityError on hash mismatch,
/// EmptyDataset when filtering removes everything, IoError otherwise.
Dataset load_dataset(const std::string& manifest_path);

/// Ledger entry kinds; payload stays serialized JSON so readers can evolve
/// independently of writers.
enum class EntryKind { AttackRecord, JudgeVerdict, MeasurementScore, CampaignEvent };

std::string_view to_string(EntryKind kind);
EntryKind entry_kind_from_string(const std::string& name);

inline constexpr int kLedgerSchemaVersion = 1;

struct LedgerEntry {
    int schema_version = kLedgerSchemaVersion;
    std::uint64_t seq = 0;
    std::string timestamp;
    EntryKind kind = EntryKind::CampaignEvent;
    std::string payload_json;  // one JSON object, serialized
};

/// Append-only newline-delimited JSON ledger. One writer per file; appends
/// are flushed to disk before returning. Reload tolerates a truncated
/// final line (a crash mid-append) and continues the sequence.
class Ledger {
public:
    explicit Ledger(std::string path);

    std::uint64_t append(EntryKind kind, const std::string& payload_json);
    std::uint64_t append(LedgerEntry entry);

    /// All complete entries currently in the file, in sequence order.
    std::vector<LedgerEntry> read_all() const;
    const std::string& path() const { return path_; }

    static std::vector<LedgerEntry> read_file(const std::string& path);

private:
    std::string path_;
    std::mutex write_mutex_;
    std::uint64_t next_seq_ = 1;
};

enum class ReportFormat { Csv, Markdown };

/// Renders the Tables-style reports from ledger contents: one attack table
/// (per target: per-level success counts, total, ASR, judge) and one
/// measurement table (per level: mean pairwise score) when such entries
/// exist. Errors: EmptyInput when the ledger has nothing tabulatable.
std::string export_report(const std::vector<LedgerEntry>& entries,
                          ReportFormat format);

}  // namespace cogload::store
