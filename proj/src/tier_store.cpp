#include "cxltier/tier_store.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cxltier/errors.hpp"
#include "cxltier/lz4_block.hpp"

namespace cxltier {

std::string_view mode_name(StorageMode m) noexcept {
  return m == StorageMode::Cacheline ? "cacheline" : "block";
}

StorageMode mode_from_name(std::string_view name) {
  std::string lower(name);
  std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cacheline") return StorageMode::Cacheline;
  if (lower == "block") return StorageMode::Block;
  throw ArgumentError("unknown storage mode '" + std::string(name) + "'");
}

namespace {

void validate(const StoreConfig& c) {
  if (c.capacity_bytes == 0 || c.capacity_bytes % kSectorBytes != 0) {
    throw ArgumentError("capacity must be a positive multiple of 4096 bytes");
  }
  if (c.capacity_bytes / kSectorBytes > std::uint64_t{UINT32_MAX}) {
    throw ArgumentError("capacity too large");
  }
  if (!valid_block_size(c.block_size)) throw ArgumentError("block size must be 1024 or 4096");
  if (!(c.compaction_trigger > 0.0 && c.compaction_trigger <= 1.0)) {
    throw ArgumentError("compaction trigger must be in (0, 1]");
  }
  if (!(c.compaction_ns_per_kb >= 0.0)) throw ArgumentError("compaction cost must be >= 0");
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

} // namespace

TierStore::TierStore(StoreConfig config) : config_(config) {
  validate(config_);
  media_.assign(config_.capacity_bytes, 0);
  sectors_.resize(config_.capacity_bytes / kSectorBytes);
  for (std::uint32_t s = 0; s < sectors_.size(); ++s) unassigned_.insert(unassigned_.end(), s);
  heap_floor_ = config_.capacity_bytes;
}

void TierStore::reconfigure(const StoreConfig& config) {
  validate(config);
  if (config.capacity_bytes != config_.capacity_bytes) {
    if (!records_.empty() || dead_bytes() != 0) {
      throw StateError("capacity can only change while the store is empty");
    }
    *this = TierStore(config);
    return;
  }
  config_ = config;
}

const PageRecord* TierStore::find(PageId id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// allocation

bool TierStore::reserve_metadata(std::uint64_t bytes, UndoLog& undo) {
  const std::uint64_t needed = ceil_div(meta_live_ + meta_dead_ + bytes, kSectorBytes);
  if (needed <= metadata_sectors_) return true;
  if (unassigned_.size() < needed) return false;
  undo.push([this, old = metadata_sectors_] { metadata_sectors_ = old; });
  metadata_sectors_ = needed;
  return true;
}

std::optional<std::uint64_t> TierStore::alloc_slot(std::uint8_t size_class, PageId page,
                                                    std::uint8_t line, UndoLog& undo) {
  const std::size_t ci = class_index(size_class);
  auto& open = open_[ci];
  if (open.empty()) {
    if (!spare_unassigned(1)) return std::nullopt;
    const std::uint32_t s = *unassigned_.begin();
    unassigned_.erase(unassigned_.begin());
    Sector& sec = sectors_[s];
    const std::uint16_t spc = slots_per_sector(size_class);
    sec.kind = SectorKind::Slab;
    sec.size_class = size_class;
    sec.slots.assign(spc, SlotOwner{});
    sec.free_stack.resize(spc);
    for (std::uint16_t i = 0; i < spc; ++i) sec.free_stack[i] = static_cast<std::uint16_t>(spc - 1 - i);
    open.insert(s);
    undo.push([this, s, ci] {
      open_[ci].erase(s);
      release_sector(s);
    });
  }

  const std::uint32_t s = *open.begin();
  Sector& sec = sectors_[s];
  const std::uint16_t slot = sec.free_stack.back();
  sec.free_stack.pop_back();
  sec.slots[slot] = SlotOwner{page, line, SlotState::Live};
  ++sec.live;
  if (sec.free_stack.empty()) open.erase(s);
  undo.push([this, s, slot, ci] {
    Sector& sec = sectors_[s];
    sec.slots[slot] = SlotOwner{};
    --sec.live;
    sec.free_stack.push_back(slot);
    open_[ci].insert(s);
  });
  return std::uint64_t{s} * kSectorBytes + std::uint64_t{slot} * size_class;
}

std::optional<std::uint64_t> TierStore::alloc_extent(std::uint32_t length, PageId page,
                                                      std::uint32_t index, UndoLog& undo) {
  if (length == 0 || length > heap_floor_) return std::nullopt;
  const std::uint64_t new_floor = heap_floor_ - length;
  std::vector<std::uint32_t> grow;
  for (std::uint64_t s = new_floor / kSectorBytes; s * kSectorBytes < heap_floor_; ++s) {
    const Sector& sec = sectors_[s];
    if (sec.kind == SectorKind::Block) continue;
    if (sec.kind != SectorKind::Unassigned) return std::nullopt;
    grow.push_back(static_cast<std::uint32_t>(s));
  }
  if (!spare_unassigned(grow.size())) return std::nullopt;

  for (std::uint32_t s : grow) {
    unassigned_.erase(s);
    sectors_[s].kind = SectorKind::Block;
  }
  undo.push([this, grow] {
    for (std::uint32_t s : grow) release_sector(s);
  });
  undo.push([this, old = heap_floor_] { heap_floor_ = old; });
  heap_floor_ = new_floor;
  extents_[new_floor] = BlockOwner{page, index, length, true};
  undo.push([this, new_floor] { extents_.erase(new_floor); });
  return new_floor;
}

void TierStore::release_sector(std::uint32_t index) {
  sectors_[index] = Sector{};
  unassigned_.insert(index);
}

void TierStore::kill_slot(std::uint64_t offset, std::uint8_t size_class) {
  Sector& sec = sectors_[offset / kSectorBytes];
  SlotOwner& owner = sec.slots[(offset % kSectorBytes) / size_class];
  owner.state = SlotState::Dead;
  --sec.live;
  ++sec.dead;
  live_slot_bytes_ -= size_class;
  dead_slot_bytes_ += size_class;
}

LineDescriptor& TierStore::line_descriptor(PageId page, std::uint8_t line) {
  return std::get<LineTable>(records_.at(page).layout)[line];
}

// ---------------------------------------------------------------------------
// page operations

StoreReceipt TierStore::store_page(PageId id, std::span<const std::uint8_t> page, StorageMode mode) {
  if (page.size() != kPageBytes) {
    throw ArgumentError("page must be 4096 bytes, got " + std::to_string(page.size()));
  }
  if (records_.contains(id)) throw StateError("page " + std::to_string(id) + " is already stored");

  StoreReceipt receipt;
  PageRecord record{id, LineTable{}};

  if (mode == StorageMode::Cacheline) {
    std::array<CompressedLine, kLinesPerPage> encoded;
    std::uint64_t data_bytes = 0;
    for (std::size_t i = 0; i < kLinesPerPage; ++i) {
      CacheLine line;
      std::memcpy(line.data(), page.data() + i * kLineBytes, kLineBytes);
      encoded[i] = compress_line(line);
      data_bytes += encoded[i].size_class();
    }
    const std::uint64_t meta = kLinesPerPage * kLineMetadataBytes;

    LineTable table{};
    auto attempt = [&] {
      UndoLog undo;
      if (!reserve_metadata(meta, undo)) return false;
      for (std::size_t i = 0; i < kLinesPerPage; ++i) {
        const CompressedLine& c = encoded[i];
        table[i] = LineDescriptor{c.scheme(), c.size_class(), 0};
        if (c.size_class() == 0) continue;
        auto off = alloc_slot(c.size_class(), id, static_cast<std::uint8_t>(i), undo);
        if (!off) {
          undo.rollback();
          return false;
        }
        table[i].offset = *off;
      }
      undo.commit();
      return true;
    };
    if (!attempt()) {
      receipt.compaction = compact();
      if (!attempt()) throw CapacityExhausted("no room for page " + std::to_string(id));
    }

    for (std::size_t i = 0; i < kLinesPerPage; ++i) {
      const auto payload = encoded[i].payload();
      if (!payload.empty()) std::memcpy(media_.data() + table[i].offset, payload.data(), payload.size());
    }
    record.layout = table;
    live_slot_bytes_ += data_bytes;
    meta_live_ += meta;
    receipt.physical_bytes_used = data_bytes + meta;
  } else {
    const std::uint32_t bs = config_.block_size;
    std::vector<CompressedBlock> blocks;
    std::uint64_t data_bytes = 0;
    for (std::uint32_t off = 0; off < kPageBytes; off += bs) {
      blocks.push_back(compress_block(page.subspan(off, bs), bs));
      data_bytes += blocks.back().compressed_len();
    }
    const std::uint64_t meta = kBlockRecordBytes;

    BlockList list;
    auto attempt = [&] {
      UndoLog undo;
      list.clear();
      if (!reserve_metadata(meta, undo)) return false;
      for (std::uint32_t j = 0; j < blocks.size(); ++j) {
        const auto len = static_cast<std::uint32_t>(blocks[j].compressed_len());
        auto off = alloc_extent(len, id, j, undo);
        if (!off) {
          undo.rollback();
          return false;
        }
        list.push_back(BlockDescriptor{bs, len, *off});
      }
      undo.commit();
      return true;
    };
    if (!attempt()) {
      receipt.compaction = compact();
      if (!attempt()) throw CapacityExhausted("no room for page " + std::to_string(id));
    }

    for (std::size_t j = 0; j < blocks.size(); ++j) {
      std::memcpy(media_.data() + list[j].offset, blocks[j].payload.data(), blocks[j].payload.size());
    }
    record.layout = std::move(list);
    live_block_bytes_ += data_bytes;
    meta_live_ += meta;
    receipt.physical_bytes_used = data_bytes + meta;
  }

  records_.emplace(id, std::move(record));
  return receipt;
}

Page TierStore::load_page(PageId id) const {
  const PageRecord* rec = find(id);
  if (rec == nullptr) throw NotFoundError("page " + std::to_string(id) + " is not stored");
  Page page{};
  if (rec->mode() == StorageMode::Cacheline) {
    for (std::size_t i = 0; i < kLinesPerPage; ++i) {
      const CacheLine line = read_line(id, i);
      std::memcpy(page.data() + i * kLineBytes, line.data(), kLineBytes);
    }
  } else {
    std::size_t at = 0;
    for (const BlockDescriptor& b : std::get<BlockList>(rec->layout)) {
      auto bytes = lz4_decompress({media_.data() + b.offset, b.compressed_len}, b.logical_len);
      std::memcpy(page.data() + at, bytes.data(), bytes.size());
      at += bytes.size();
    }
  }
  return page;
}

CacheLine TierStore::read_line(PageId id, std::size_t line_index) const {
  const PageRecord* rec = find(id);
  if (rec == nullptr) throw NotFoundError("page " + std::to_string(id) + " is not stored");
  if (line_index >= kLinesPerPage) throw ArgumentError("line index out of range");
  if (rec->mode() != StorageMode::Cacheline) {
    throw UnsupportedGranularity("page " + std::to_string(id) + " is stored as a compressed block");
  }
  const LineDescriptor& d = std::get<LineTable>(rec->layout)[line_index];
  const std::span<const std::uint8_t> payload{media_.data() + d.offset, payload_size(d.scheme)};
  return decompress_line(CompressedLine::from_parts(d.scheme, d.size_class, payload));
}

WriteOutcome TierStore::write_line(PageId id, std::size_t line_index, const CacheLine& line) {
  auto it = records_.find(id);
  if (it == records_.end()) throw NotFoundError("page " + std::to_string(id) + " is not stored");
  if (line_index >= kLinesPerPage) throw ArgumentError("line index out of range");
  if (it->second.mode() != StorageMode::Cacheline) {
    throw UnsupportedGranularity("page " + std::to_string(id) + " is stored as a compressed block");
  }

  const CompressedLine enc = compress_line(line);
  const auto idx = static_cast<std::uint8_t>(line_index);
  const std::uint8_t old_class = line_descriptor(id, idx).size_class;

  WriteOutcome out;
  out.scheme = enc.scheme();
  out.size_class = enc.size_class();

  if (enc.size_class() == old_class) {
    LineDescriptor& d = line_descriptor(id, idx);
    if (old_class > 0) std::memcpy(media_.data() + d.offset, enc.payload().data(), enc.payload().size());
    d.scheme = enc.scheme();
    return out;
  }

  std::uint64_t new_offset = 0;
  if (enc.size_class() > 0) {
    UndoLog undo;
    auto off = alloc_slot(enc.size_class(), id, idx, undo);
    if (!off) {
      undo.rollback();
      out.compaction = compact();
      off = alloc_slot(enc.size_class(), id, idx, undo);
      if (!off) {
        undo.rollback();
        throw CapacityExhausted("no room to grow line " + std::to_string(line_index) + " of page " +
                                std::to_string(id));
      }
    }
    undo.commit();
    new_offset = *off;
    std::memcpy(media_.data() + new_offset, enc.payload().data(), enc.payload().size());
  }

  // Compaction above may have moved the old slot; fetch the descriptor fresh.
  LineDescriptor& d = line_descriptor(id, idx);
  if (d.size_class > 0) kill_slot(d.offset, d.size_class);
  d = LineDescriptor{enc.scheme(), enc.size_class(), new_offset};
  live_slot_bytes_ += enc.size_class();

  out.relocated = true;
  out.delta_physical_bytes = std::int64_t{enc.size_class()} - std::int64_t{old_class};
  maybe_auto_compact(out.compaction);
  return out;
}

FreeReceipt TierStore::free_page(PageId id) {
  auto it = records_.find(id);
  if (it == records_.end()) throw NotFoundError("page " + std::to_string(id) + " is not stored");

  FreeReceipt receipt;
  if (auto* table = std::get_if<LineTable>(&it->second.layout)) {
    for (const LineDescriptor& d : *table) {
      if (d.size_class == 0) continue;
      kill_slot(d.offset, d.size_class);
      receipt.freed_physical_bytes += d.size_class;
    }
    const std::uint64_t meta = kLinesPerPage * kLineMetadataBytes;
    meta_live_ -= meta;
    meta_dead_ += meta;
    receipt.freed_physical_bytes += meta;
  } else {
    for (const BlockDescriptor& b : std::get<BlockList>(it->second.layout)) {
      extents_.at(b.offset).live = false;
      live_block_bytes_ -= b.compressed_len;
      dead_block_bytes_ += b.compressed_len;
      receipt.freed_physical_bytes += b.compressed_len;
    }
    meta_live_ -= kBlockRecordBytes;
    meta_dead_ += kBlockRecordBytes;
    receipt.freed_physical_bytes += kBlockRecordBytes;
  }
  records_.erase(it);
  maybe_auto_compact(receipt.compaction);
  return receipt;
}

// ---------------------------------------------------------------------------
// compaction

void TierStore::maybe_auto_compact(std::optional<CompactionReport>& out) {
  const double frag = static_cast<double>(dead_bytes()) / static_cast<double>(config_.capacity_bytes);
  if (frag <= config_.compaction_trigger) return;
  const CompactionReport r = compact();
  if (!out) {
    out = r;
    return;
  }
  out->bytes_reclaimed += r.bytes_reclaimed;
  out->slots_moved += r.slots_moved;
  out->bytes_moved += r.bytes_moved;
  out->duration_modeled_ns += r.duration_modeled_ns;
}

CompactionReport TierStore::compact() {
  CompactionReport report;
  report.bytes_reclaimed = dead_bytes();

  meta_dead_ = 0;
  metadata_sectors_ = ceil_div(meta_live_, kSectorBytes);

  compact_slabs(report);
  compact_heap(report);

  // Slide slab sectors down into the lowest unassigned sectors so free space
  // stays contiguous between the slabs and the block heap.
  std::int64_t hi = static_cast<std::int64_t>(sectors_.size()) - 1;
  while (!unassigned_.empty()) {
    while (hi >= 0 && sectors_[hi].kind != SectorKind::Slab) --hi;
    if (hi < 0) break;
    const std::uint32_t lo = *unassigned_.begin();
    if (lo >= hi) break;
    const auto from = static_cast<std::uint32_t>(hi);
    Sector& src = sectors_[from];
    const std::uint8_t c = src.size_class;
    std::memcpy(media_.data() + std::uint64_t{lo} * kSectorBytes,
                media_.data() + std::uint64_t{from} * kSectorBytes, kSectorBytes);
    for (std::size_t j = 0; j < src.slots.size(); ++j) {
      const SlotOwner& owner = src.slots[j];
      if (owner.state != SlotState::Live) continue;
      line_descriptor(owner.page, owner.line).offset = std::uint64_t{lo} * kSectorBytes + j * c;
      ++report.slots_moved;
      report.bytes_moved += c;
    }
    unassigned_.erase(unassigned_.begin());
    sectors_[lo] = std::move(src);
    release_sector(from);
  }

  rebuild_open_sets();
  report.duration_modeled_ns =
      static_cast<double>(report.bytes_moved) / 1024.0 * config_.compaction_ns_per_kb;
  return report;
}

void TierStore::move_slot(std::uint64_t from, std::uint64_t to, std::uint8_t size_class) {
  Sector& src = sectors_[from / kSectorBytes];
  Sector& dst = sectors_[to / kSectorBytes];
  SlotOwner& a = src.slots[(from % kSectorBytes) / size_class];
  SlotOwner& b = dst.slots[(to % kSectorBytes) / size_class];
  std::memcpy(media_.data() + to, media_.data() + from, size_class);
  b = a;
  a = SlotOwner{};
  --src.live;
  ++dst.live;
  line_descriptor(b.page, b.line).offset = to;
}

void TierStore::compact_slabs(CompactionReport& report) {
  for (Sector& sec : sectors_) {
    if (sec.kind != SectorKind::Slab) continue;
    for (SlotOwner& o : sec.slots) {
      if (o.state == SlotState::Dead) o = SlotOwner{};
    }
    sec.dead = 0;
  }
  dead_slot_bytes_ = 0;

  for (std::uint8_t c = 8; c <= 64; c += 8) {
    std::vector<std::uint32_t> secs;
    std::uint64_t live = 0;
    for (std::uint32_t s = 0; s < sectors_.size(); ++s) {
      if (sectors_[s].kind == SectorKind::Slab && sectors_[s].size_class == c) {
        secs.push_back(s);
        live += sectors_[s].live;
      }
    }
    if (secs.empty()) continue;

    const std::uint16_t spc = slots_per_sector(c);
    const std::size_t keep = ceil_div(live, spc);
    std::ranges::stable_sort(secs, [&](std::uint32_t a, std::uint32_t b) {
      return sectors_[a].live > sectors_[b].live;
    });

    std::size_t t = 0;
    std::size_t cursor = 0;
    for (std::size_t k = keep; k < secs.size(); ++k) {
      const std::uint32_t s = secs[k];
      for (std::size_t j = 0; j < spc; ++j) {
        if (sectors_[s].slots[j].state != SlotState::Live) continue;
        // Next free slot among the kept sectors.
        while (sectors_[secs[t]].slots[cursor].state != SlotState::Free) {
          if (++cursor == spc) {
            cursor = 0;
            ++t;
          }
        }
        move_slot(std::uint64_t{s} * kSectorBytes + j * c,
                  std::uint64_t{secs[t]} * kSectorBytes + cursor * c, c);
        ++report.slots_moved;
        report.bytes_moved += c;
      }
    }
    for (std::size_t k = keep; k < secs.size(); ++k) release_sector(secs[k]);
    for (std::size_t k = 0; k < keep; ++k) {
      if (sectors_[secs[k]].live == 0) release_sector(secs[k]);
    }
  }
}

void TierStore::compact_heap(CompactionReport& report) {
  std::map<std::uint64_t, BlockOwner> packed;
  std::uint64_t top = config_.capacity_bytes;
  for (auto it = extents_.rbegin(); it != extents_.rend(); ++it) {
    const auto& [offset, owner] = *it;
    if (!owner.live) continue;
    const std::uint64_t to = top - owner.length;
    if (to != offset) {
      std::memmove(media_.data() + to, media_.data() + offset, owner.length);
      std::get<BlockList>(records_.at(owner.page).layout)[owner.index].offset = to;
      ++report.slots_moved;
      report.bytes_moved += owner.length;
    }
    packed.emplace(to, owner);
    top = to;
  }
  extents_ = std::move(packed);
  dead_block_bytes_ = 0;

  const std::uint64_t old_floor = heap_floor_;
  heap_floor_ = top;
  for (std::uint64_t s = old_floor / kSectorBytes; (s + 1) * kSectorBytes <= heap_floor_; ++s) {
    if (sectors_[s].kind == SectorKind::Block) release_sector(static_cast<std::uint32_t>(s));
  }
}

void TierStore::rebuild_open_sets() {
  for (auto& set : open_) set.clear();
  for (std::uint32_t s = 0; s < sectors_.size(); ++s) {
    Sector& sec = sectors_[s];
    if (sec.kind != SectorKind::Slab) continue;
    sec.free_stack.clear();
    for (std::size_t j = sec.slots.size(); j-- > 0;) {
      if (sec.slots[j].state == SlotState::Free) sec.free_stack.push_back(static_cast<std::uint16_t>(j));
    }
    if (!sec.free_stack.empty()) open_[class_index(sec.size_class)].insert(s);
  }
}

// ---------------------------------------------------------------------------
// reporting

TierTelemetry TierStore::telemetry() const {
  TierTelemetry t;
  t.capacity_bytes = config_.capacity_bytes;
  t.live_pages = records_.size();
  t.logical_bytes = t.live_pages * kPageBytes;
  t.metadata_bytes = meta_live_;
  t.physical_bytes = live_slot_bytes_ + live_block_bytes_ + meta_live_;
  t.dead_bytes = dead_bytes();
  t.free_bytes = t.capacity_bytes - t.physical_bytes - t.dead_bytes;
  const auto cap = static_cast<double>(t.capacity_bytes);
  t.compression_ratio = t.physical_bytes == 0
                            ? 1.0
                            : static_cast<double>(t.logical_bytes) / static_cast<double>(t.physical_bytes);
  t.expansion_factor = static_cast<double>(t.logical_bytes + t.free_bytes) / cap;
  t.fragmentation = static_cast<double>(t.dead_bytes) / cap;
  return t;
}

void TierStore::audit() const {
  auto fail = [](const std::string& what) { throw std::logic_error("tier_store audit: " + what); };
  const std::uint64_t cap = config_.capacity_bytes;

  struct Extent {
    std::uint64_t offset;
    std::uint64_t length;
    PageId page;
  };
  std::vector<Extent> extents;
  std::uint64_t line_bytes = 0, block_bytes = 0, meta = 0;

  for (const auto& [id, rec] : records_) {
    if (rec.page_id != id) fail("record key mismatch for page " + std::to_string(id));
    if (const auto* table = std::get_if<LineTable>(&rec.layout)) {
      meta += kLinesPerPage * kLineMetadataBytes;
      for (std::size_t i = 0; i < kLinesPerPage; ++i) {
        const LineDescriptor& d = (*table)[i];
        if (d.size_class != size_class_for(payload_size(d.scheme))) {
          fail("size class does not match scheme on page " + std::to_string(id));
        }
        if (d.size_class == 0) continue;
        extents.push_back({d.offset, d.size_class, id});
        line_bytes += d.size_class;
        const std::uint64_t s = d.offset / kSectorBytes;
        if (s >= sectors_.size()) fail("line extent past capacity");
        const Sector& sec = sectors_[s];
        if (sec.kind != SectorKind::Slab || sec.size_class != d.size_class) {
          fail("line extent in a sector of the wrong kind or class");
        }
        if ((d.offset % kSectorBytes) % d.size_class != 0) fail("misaligned slot");
        const SlotOwner& o = sec.slots[(d.offset % kSectorBytes) / d.size_class];
        if (o.state != SlotState::Live || o.page != id || o.line != i) fail("slot owner mismatch");
      }
    } else {
      meta += kBlockRecordBytes;
      const auto& blocks = std::get<BlockList>(rec.layout);
      for (std::uint32_t j = 0; j < blocks.size(); ++j) {
        const BlockDescriptor& b = blocks[j];
        extents.push_back({b.offset, b.compressed_len, id});
        block_bytes += b.compressed_len;
        if (b.offset < heap_floor_) fail("block extent below heap floor");
        auto it = extents_.find(b.offset);
        if (it == extents_.end() || !it->second.live || it->second.page != id || it->second.index != j ||
            it->second.length != b.compressed_len) {
          fail("block extent owner mismatch");
        }
      }
    }
  }

  std::ranges::sort(extents, {}, &Extent::offset);
  for (std::size_t i = 0; i < extents.size(); ++i) {
    if (extents[i].offset + extents[i].length > cap) fail("extent past capacity");
    if (i > 0 && extents[i - 1].offset + extents[i - 1].length > extents[i].offset) {
      fail("overlapping extents at offset " + std::to_string(extents[i].offset) + " (pages " +
           std::to_string(extents[i - 1].page) + ", " + std::to_string(extents[i].page) + ")");
    }
  }
  if (line_bytes != live_slot_bytes_) fail("live slot byte counter drift");
  if (block_bytes != live_block_bytes_) fail("live block byte counter drift");
  if (meta != meta_live_) fail("metadata counter drift");

  std::uint64_t free = 0, dead = 0, slab_live = 0, unassigned = 0;
  const std::uint64_t heap_first = heap_floor_ < cap ? heap_floor_ / kSectorBytes : sectors_.size();
  for (std::uint32_t s = 0; s < sectors_.size(); ++s) {
    const Sector& sec = sectors_[s];
    const bool in_heap = s >= heap_first;
    switch (sec.kind) {
      case SectorKind::Unassigned:
        if (in_heap) fail("unassigned sector inside block heap");
        if (!unassigned_.contains(s)) fail("unassigned sector missing from pool");
        ++unassigned;
        break;
      case SectorKind::Slab: {
        if (in_heap) fail("slab sector inside block heap");
        std::uint64_t l = 0, d = 0, f = 0;
        for (const SlotOwner& o : sec.slots) {
          l += o.state == SlotState::Live;
          d += o.state == SlotState::Dead;
          f += o.state == SlotState::Free;
        }
        if (l != sec.live || d != sec.dead) fail("slab sector counters drift");
        if (f != sec.free_stack.size()) fail("slab free list drift");
        if ((f > 0) != open_[class_index(sec.size_class)].contains(s)) fail("open-sector set drift");
        const std::uint64_t c = sec.size_class;
        slab_live += l * c;
        dead += d * c;
        free += f * c + (kSectorBytes - sec.slots.size() * c);
        break;
      }
      case SectorKind::Block:
        if (!in_heap) fail("block sector outside heap");
        if (std::uint64_t{s} * kSectorBytes < heap_floor_) free += heap_floor_ - std::uint64_t{s} * kSectorBytes;
        break;
    }
  }
  if (unassigned != unassigned_.size()) fail("unassigned pool holds non-unassigned sectors");
  if (slab_live != live_slot_bytes_) fail("slab walk disagrees with live slot bytes");

  std::uint64_t heap_live = 0, heap_dead = 0, expect = heap_floor_;
  for (const auto& [offset, owner] : extents_) {
    if (offset != expect) fail("block heap has a gap at " + std::to_string(offset));
    expect += owner.length;
    (owner.live ? heap_live : heap_dead) += owner.length;
  }
  if (expect != cap) fail("block heap does not end at capacity");
  if (heap_live != live_block_bytes_ || heap_dead != dead_block_bytes_) fail("block heap counters drift");
  dead += heap_dead;

  const std::uint64_t meta_total = meta_live_ + meta_dead_;
  if (metadata_sectors_ * kSectorBytes < meta_total) fail("metadata exceeds reserved sectors");
  if (metadata_sectors_ > unassigned) fail("metadata reservation exceeds unassigned sectors");
  free += unassigned * kSectorBytes - meta_total;
  dead += meta_dead_;
  if (dead != dead_bytes()) fail("dead byte counter drift");
  if (free + line_bytes + block_bytes + dead + meta_live_ != cap) fail("byte conservation violated");
}

void TierStore::dump(std::ostream& os) const {
  const TierTelemetry t = telemetry();
  os << "arena capacity=" << t.capacity_bytes << " sectors=" << sectors_.size()
     << " unassigned=" << unassigned_.size() << " metadata_sectors=" << metadata_sectors_
     << " heap_floor=" << heap_floor_ << '\n';
  os << "bytes logical=" << t.logical_bytes << " physical=" << t.physical_bytes
     << " metadata=" << t.metadata_bytes << " dead=" << t.dead_bytes << " free=" << t.free_bytes << '\n';
  for (std::uint32_t s = 0; s < sectors_.size(); ++s) {
    const Sector& sec = sectors_[s];
    if (sec.kind == SectorKind::Slab) {
      os << "sector " << s << " slab class=" << int{sec.size_class} << " live=" << sec.live
         << " dead=" << sec.dead << " free=" << sec.free_stack.size() << '\n';
    } else if (sec.kind == SectorKind::Block) {
      os << "sector " << s << " block\n";
    }
  }
  for (const auto& [id, rec] : records_) {
    os << "page " << id << " mode=" << mode_name(rec.mode()) << '\n';
    if (const auto* table = std::get_if<LineTable>(&rec.layout)) {
      for (std::size_t i = 0; i < kLinesPerPage; ++i) {
        const LineDescriptor& d = (*table)[i];
        os << "  line " << i << ' ' << scheme_name(d.scheme) << " class=" << int{d.size_class};
        if (d.size_class > 0) os << " offset=" << d.offset;
        os << '\n';
      }
    } else {
      const auto& blocks = std::get<BlockList>(rec.layout);
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        os << "  block " << j << " logical=" << blocks[j].logical_len << " len=" << blocks[j].compressed_len
           << " offset=" << blocks[j].offset << '\n';
      }
    }
  }
}

} // namespace cxltier
