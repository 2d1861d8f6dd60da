#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cxltier/line_codec.hpp"

namespace cxltier {

using PageId = std::uint64_t;
using Page = std::array<std::uint8_t, kPageBytes>;

enum class StorageMode : std::uint8_t { Cacheline, Block };

std::string_view mode_name(StorageMode m) noexcept;
/// Accepts "cacheline" / "block" (case-insensitive). Throws ArgumentError.
StorageMode mode_from_name(std::string_view name);

inline constexpr std::uint64_t kSectorBytes = 4096;
/// Translation metadata charged per page stored in block mode.
inline constexpr std::uint64_t kBlockRecordBytes = 64;

struct LineDescriptor {
  Scheme scheme = Scheme::Z;
  std::uint8_t size_class = 0;
  std::uint64_t offset = 0; ///< unused when size_class == 0
};

struct BlockDescriptor {
  std::uint32_t logical_len = 0;
  std::uint32_t compressed_len = 0;
  std::uint64_t offset = 0;
};

using LineTable = std::array<LineDescriptor, kLinesPerPage>;
using BlockList = std::vector<BlockDescriptor>;

/// Translation entry for one host page: per-line descriptors or block extents.
struct PageRecord {
  PageId page_id = 0;
  std::variant<LineTable, BlockList> layout;

  StorageMode mode() const noexcept {
    return std::holds_alternative<LineTable>(layout) ? StorageMode::Cacheline : StorageMode::Block;
  }
};

struct StoreConfig {
  std::uint64_t capacity_bytes = 64ull << 20;
  std::uint32_t block_size = 4096;          ///< LZ4 unit in block mode: 1024 or 4096
  double compaction_trigger = 0.25;         ///< auto-compact when dead/capacity exceeds this
  double compaction_ns_per_kb = 50.0;       ///< modeled cost of moving data during compaction
};

struct CompactionReport {
  std::uint64_t bytes_reclaimed = 0;
  std::uint64_t slots_moved = 0;
  std::uint64_t bytes_moved = 0;
  double duration_modeled_ns = 0.0;
};

struct StoreReceipt {
  std::uint64_t physical_bytes_used = 0;
  std::optional<CompactionReport> compaction; ///< set if admission forced a compaction
};

struct WriteOutcome {
  bool relocated = false;
  std::int64_t delta_physical_bytes = 0;
  Scheme scheme = Scheme::Z;
  std::uint8_t size_class = 0;
  std::optional<CompactionReport> compaction;
};

struct FreeReceipt {
  std::uint64_t freed_physical_bytes = 0;
  std::optional<CompactionReport> compaction;
};

/// Capacity snapshot. physical_bytes counts live data plus live metadata;
/// dead (freed, not yet compacted) bytes are reported separately.
struct TierTelemetry {
  std::uint64_t capacity_bytes = 0;
  std::uint64_t logical_bytes = 0;
  std::uint64_t physical_bytes = 0;
  std::uint64_t metadata_bytes = 0;
  std::uint64_t dead_bytes = 0;
  std::uint64_t free_bytes = 0;
  double compression_ratio = 1.0;  ///< logical / physical, 1.0 when empty
  double expansion_factor = 1.0;   ///< (logical + free) / capacity
  double fragmentation = 0.0;      ///< dead / capacity
  std::uint64_t live_pages = 0;
};

/// Compressed-tier memory manager.
///
/// The arena is split into 4 KiB sectors. Cache-line payloads live in slab
/// sectors dedicated to one size class, allocated from the low end of the
/// arena; block-mode LZ4 extents live in a byte-granular heap growing down
/// from the top. Metadata is charged against capacity as whole reserved
/// sectors. Freed space turns dead and is only reusable after compact().
///
/// Not internally synchronized: one mutating call at a time.
class TierStore {
public:
  explicit TierStore(StoreConfig config);

  StoreReceipt store_page(PageId id, std::span<const std::uint8_t> page, StorageMode mode);
  Page load_page(PageId id) const;
  CacheLine read_line(PageId id, std::size_t line_index) const;
  WriteOutcome write_line(PageId id, std::size_t line_index, const CacheLine& line);
  FreeReceipt free_page(PageId id);
  CompactionReport compact();
  TierTelemetry telemetry() const;

  bool contains(PageId id) const { return records_.contains(id); }
  const PageRecord* find(PageId id) const;
  std::size_t live_pages() const noexcept { return records_.size(); }
  const StoreConfig& config() const noexcept { return config_; }

  /// Block size and compaction parameters may change at any time; capacity
  /// only while the store is empty. Throws ArgumentError / StateError.
  void reconfigure(const StoreConfig& config);

  /// Cross-checks translation records against the arena: extents in range and
  /// pairwise disjoint, slot ownership, byte conservation. Throws
  /// std::logic_error describing the first violation.
  void audit() const;

  /// Structured text listing of arena occupancy and every page record.
  void dump(std::ostream& os) const;

private:
  enum class SectorKind : std::uint8_t { Unassigned, Slab, Block };
  enum class SlotState : std::uint8_t { Free, Live, Dead };

  struct SlotOwner {
    PageId page = 0;
    std::uint8_t line = 0;
    SlotState state = SlotState::Free;
  };

  struct Sector {
    SectorKind kind = SectorKind::Unassigned;
    std::uint8_t size_class = 0;
    std::uint16_t live = 0;
    std::uint16_t dead = 0;
    std::vector<SlotOwner> slots;
    std::vector<std::uint16_t> free_stack; ///< descending, back() is lowest free slot
  };

  struct BlockOwner {
    PageId page = 0;
    std::uint32_t index = 0;
    std::uint32_t length = 0;
    bool live = true;
  };

  class UndoLog {
  public:
    void push(std::function<void()> step) { steps_.push_back(std::move(step)); }
    void rollback() {
      for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
      steps_.clear();
    }
    void commit() { steps_.clear(); }

  private:
    std::vector<std::function<void()>> steps_;
  };

  static constexpr std::size_t class_index(std::uint8_t size_class) { return size_class / 8; }
  static constexpr std::uint16_t slots_per_sector(std::uint8_t size_class) {
    return static_cast<std::uint16_t>(kSectorBytes / size_class);
  }

  std::uint64_t sector_count() const noexcept { return sectors_.size(); }
  std::uint64_t dead_bytes() const noexcept { return dead_slot_bytes_ + dead_block_bytes_ + meta_dead_; }
  bool spare_unassigned(std::size_t n) const noexcept {
    return unassigned_.size() >= metadata_sectors_ + n;
  }

  bool reserve_metadata(std::uint64_t bytes, UndoLog& undo);
  std::optional<std::uint64_t> alloc_slot(std::uint8_t size_class, PageId page, std::uint8_t line,
                                          UndoLog& undo);
  std::optional<std::uint64_t> alloc_extent(std::uint32_t length, PageId page, std::uint32_t index,
                                            UndoLog& undo);
  void kill_slot(std::uint64_t offset, std::uint8_t size_class);
  void release_sector(std::uint32_t index);
  void maybe_auto_compact(std::optional<CompactionReport>& out);
  void compact_slabs(CompactionReport& report);
  void compact_heap(CompactionReport& report);
  void move_slot(std::uint64_t from, std::uint64_t to, std::uint8_t size_class);
  void rebuild_open_sets();
  LineDescriptor& line_descriptor(PageId page, std::uint8_t line);

  StoreConfig config_;
  std::vector<std::uint8_t> media_;
  std::vector<Sector> sectors_;
  std::set<std::uint32_t> unassigned_;
  std::array<std::set<std::uint32_t>, 9> open_; ///< slab sectors with free slots, per class
  std::uint64_t heap_floor_ = 0;                ///< block heap occupies [heap_floor_, capacity)
  std::map<std::uint64_t, BlockOwner> extents_; ///< block extents by offset, live and dead
  std::map<PageId, PageRecord> records_;

  std::uint64_t metadata_sectors_ = 0;
  std::uint64_t meta_live_ = 0;
  std::uint64_t meta_dead_ = 0;
  std::uint64_t live_slot_bytes_ = 0;
  std::uint64_t dead_slot_bytes_ = 0;
  std::uint64_t live_block_bytes_ = 0;
  std::uint64_t dead_block_bytes_ = 0;
};

} // namespace cxltier
