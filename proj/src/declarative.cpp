#include "actr/declarative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace actr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const SlotValue* Chunk::slot(std::string_view n) const {
    for (const auto& [name, value] : slots)
        if (name == n) return &value;
    return nullptr;
}

std::vector<ChunkId> Chunk::references() const {
    std::vector<ChunkId> out;
    for (const auto& [name, value] : slots)
        if (const auto* ref = std::get_if<ChunkRef>(&value)) out.push_back(ref->id);
    return out;
}

Time Chunk::last_event_time() const {
    return events.empty() ? creation_time : events.back().time;
}

double power_law_trace_sum(std::span<const UsageEvent> events, Time now) {
    double sum = 0.0;
    for (const auto& e : events) {
        const double age = now - e.time;
        if (age <= 0.0) continue;  // zero-age traces diverge; future events void
        sum += std::pow(age, -e.decay);
    }
    return sum;
}

double base_level(std::span<const UsageEvent> events, Time now, double offset_B) {
    const double sum = power_law_trace_sum(events, now);
    if (sum <= 0.0) return -kInf;
    return std::log(sum) + offset_B;
}

void Memory::validate_references(
    const std::vector<std::pair<std::string, SlotValue>>& slots) const {
    for (const auto& [name, value] : slots) {
        if (const auto* ref = std::get_if<ChunkRef>(&value)) {
            if (!has(ref->id))
                throw ReferenceError("slot '" + name + "' references unknown chunk id " +
                                     std::to_string(ref->id));
        }
    }
}

ChunkId Memory::declare_chunk(std::string kind, Time now, std::string name) {
    const ChunkId id = static_cast<ChunkId>(chunks_.size());
    Chunk c;
    c.id = id;
    c.kind = std::move(kind);
    c.name = name.empty() ? "c" + std::to_string(id) : std::move(name);
    c.creation_time = now;
    c.events.push_back({now, decay_for_new_event(c, now)});
    if (by_name_.count(c.name))
        throw ReferenceError("duplicate chunk name '" + c.name + "'");
    by_name_.emplace(c.name, id);
    chunks_.push_back(std::move(c));
    return id;
}

ChunkId Memory::add_chunk(std::string kind,
                          std::vector<std::pair<std::string, SlotValue>> slots,
                          Time now, std::string name) {
    validate_references(slots);
    const ChunkId id = declare_chunk(std::move(kind), now, std::move(name));
    chunks_[static_cast<size_t>(id)].slots = std::move(slots);
    return id;
}

void Memory::set_slots(ChunkId id,
                       const std::vector<std::pair<std::string, SlotValue>>& slots) {
    Chunk& c = const_cast<Chunk&>(chunk(id));
    validate_references(slots);
    for (const auto& [name, value] : slots) {
        bool found = false;
        for (auto& [have, v] : c.slots) {
            if (have == name) {
                v = value;
                found = true;
                break;
            }
        }
        if (!found) c.slots.emplace_back(name, value);
    }
}

bool Memory::has(ChunkId id) const {
    return id >= 0 && static_cast<size_t>(id) < chunks_.size();
}

const Chunk& Memory::chunk(ChunkId id) const {
    if (!has(id)) throw ReferenceError("unknown chunk id " + std::to_string(id));
    return chunks_[static_cast<size_t>(id)];
}

ChunkId Memory::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? kNoChunk : it->second;
}

double Memory::decay_for_new_event(const Chunk& c, Time now) const {
    struct Visitor {
        const Memory& memory;
        const Chunk& chunk;
        Time now;
        double operator()(const ConstantDecay& m) const { return m.d; }
        double operator()(const SpacingAS91& m) const {
            if (chunk.events.empty()) return m.d1;  // first learning event
            const double gap = now - chunk.events.back().time;
            return std::max(m.d1, m.b * std::pow(gap, -m.d1));
        }
        double operator()(const SpacingPA08& m) const {
            // Activation from the existing traces, just before this event.
            const double a = base_level(chunk.events, now, memory.params_.base_B);
            return m.c * std::exp(a) + m.alpha;
        }
    };
    return std::visit(Visitor{*this, c, now}, params_.decay_mode);
}

UsageEvent Memory::record_use(ChunkId id, Time now) {
    Chunk& c = const_cast<Chunk&>(chunk(id));
    if (now < c.last_event_time())
        throw OrderingError("use of '" + c.name + "' at " + format_number(now) +
                            " precedes its last event at " +
                            format_number(c.last_event_time()));
    UsageEvent e{now, decay_for_new_event(c, now)};
    c.events.push_back(e);
    return e;
}

double Memory::base_activation(ChunkId id, Time now) const {
    return base_level(chunk(id).events, now, params_.base_B);
}

double Memory::activation(ChunkId id, const Context& context,
                          const AssociativeSource& assoc, Time now) const {
    double a = base_activation(id, now);
    for (const auto& el : context) a += el.weight * assoc.strength(id, el.id);
    return a;
}

double Memory::recall_probability(ChunkId id, const Context& context,
                                  const AssociativeSource& assoc, Time now) const {
    const double a = activation(id, context, assoc, now);
    if (a == -kInf) return 0.0;
    return 1.0 / (1.0 + std::exp(-(a - params_.recall_threshold_tau) /
                                 params_.recall_noise_s));
}

Time Memory::retrieval_latency(ChunkId id, const Context& context,
                               const AssociativeSource& assoc, Time now) const {
    const double a = activation(id, context, assoc, now);
    if (a == -kInf) return kInf;
    return params_.retrieval_F * std::exp(-a) + params_.retrieval_C;
}

std::string Memory::display(const SlotValue& v) const {
    if (const auto* n = std::get_if<double>(&v)) return format_number(*n);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    const ChunkRef ref = std::get<ChunkRef>(v);
    return has(ref.id) ? "@" + chunks_[static_cast<size_t>(ref.id)].name
                       : "@#" + std::to_string(ref.id);
}

}  // namespace actr
