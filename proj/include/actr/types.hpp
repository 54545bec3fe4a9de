#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace actr {

/// Simulated time in seconds. All event histories and latencies use it.
using Time = double;

/// Opaque chunk identifier, unique within one Memory instance.
using ChunkId = std::int32_t;
inline constexpr ChunkId kNoChunk = -1;

/// A slot holding a reference to another chunk.
struct ChunkRef {
    ChunkId id = kNoChunk;
    friend bool operator==(ChunkRef a, ChunkRef b) { return a.id == b.id; }
    friend bool operator!=(ChunkRef a, ChunkRef b) { return a.id != b.id; }
};

/// Slot contents: a number, a symbol, or a reference to another chunk.
using SlotValue = std::variant<double, std::string, ChunkRef>;

/// Total order over slot values (type rank, then value). Used for
/// deterministic instantiation ordering.
bool slot_value_less(const SlotValue& a, const SlotValue& b);

/// One element of the current context: a chunk and its salience weight.
struct ContextElement {
    ChunkId id = kNoChunk;
    double weight = 1.0;
};

/// The current context: goal-related chunks with weights in [0,1],
/// no duplicate ids.
using Context = std::vector<ContextElement>;

/// Supplier of associative strengths s_ij. The association module
/// implements this; activation queries consume it.
class AssociativeSource {
public:
    virtual ~AssociativeSource() = default;
    virtual double strength(ChunkId i, ChunkId j) const = 0;
};

/// Source with no learned associations; every strength is zero.
class NullAssociativeSource final : public AssociativeSource {
public:
    double strength(ChunkId, ChunkId) const override { return 0.0; }
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A slot names a chunk that does not exist.
struct ReferenceError : Error {
    using Error::Error;
};

/// An event was recorded earlier than the previous one.
struct OrderingError : Error {
    using Error::Error;
};

/// A numeric argument is outside its valid domain.
struct DomainError : Error {
    using Error::Error;
};

/// Goal stack misuse (pop on empty).
struct StackError : Error {
    using Error::Error;
};

/// Conflict resolution was handed an empty match list.
struct NoMatchError : Error {
    using Error::Error;
};

/// A trace does not contain the requested complete goal episode.
struct EpisodeError : Error {
    using Error::Error;
};

/// Two productions cannot be chained into one.
struct CompositionError : Error {
    using Error::Error;
};

/// Model-file or trace-file syntax/validation failure.
struct ParseError : Error {
    int line = 0;
    ParseError(int line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Locale-independent shortest round-trip formatting ("42", "0.5", "1e-07").
std::string format_number(double v);

/// Locale-independent fixed-point formatting, for trace timestamps.
std::string format_fixed(double v, int precision);

}  // namespace actr
