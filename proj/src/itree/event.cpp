#include "itree/event.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace itree {

namespace {

constexpr size_t kChunkBits = 12;
constexpr size_t kChunk = size_t(1) << kChunkBits;
constexpr size_t kMaxChunks = size_t(1) << 16;

// Append-only table readable without locking: the chunk directory never
// reallocates and entries are published before their ids escape.
template <typename T>
class Table {
public:
    Table() { chunks_.reserve(kMaxChunks); }

    const T& at(uint32_t id) const { return (*chunks_[id >> kChunkBits])[id & (kChunk - 1)]; }

    uint32_t push(T item)
    {
        if (size_ == chunks_.size() * kChunk) {
            if (chunks_.size() == kMaxChunks)
                throw std::length_error("interning table exhausted");
            chunks_.push_back(std::make_unique<std::array<T, kChunk>>());
        }
        uint32_t id = static_cast<uint32_t>(size_);
        (*chunks_[id >> kChunkBits])[id & (kChunk - 1)] = std::move(item);
        ++size_;
        return id;
    }

    size_t size() const { return size_; }

private:
    std::vector<std::unique_ptr<std::array<T, kChunk>>> chunks_;
    size_t size_ = 0;
};

struct ChannelInfo {
    std::string name;
    std::string display;
};

struct EventInfo {
    Channel channel;
    Value payload;
};

struct EventKey {
    uint32_t channel;
    Value payload;
    bool operator==(const EventKey& o) const { return channel == o.channel && payload == o.payload; }
};

struct EventKeyHash {
    size_t operator()(const EventKey& k) const { return k.payload.hash() * 31 + k.channel; }
};

struct Registry {
    std::shared_mutex mu;
    Table<ChannelInfo> channels;
    std::unordered_map<std::string, uint32_t> channelIds;
    Table<EventInfo> events;
    std::unordered_map<EventKey, uint32_t, EventKeyHash> eventIds;

    // id 0 of both tables is the default-constructed placeholder
    Registry()
    {
        channels.push(ChannelInfo{"<none>", "<none>"});
        events.push(EventInfo{Channel(), Value::unit()});
    }
};

Registry& registry()
{
    static Registry* r = new Registry();
    return *r;
}

uint32_t internChannel(const std::string& name, const std::string* display)
{
    Registry& r = registry();
    {
        std::shared_lock lk(r.mu);
        auto it = r.channelIds.find(name);
        if (it != r.channelIds.end())
            return it->second;
    }
    std::unique_lock lk(r.mu);
    auto it = r.channelIds.find(name);
    if (it != r.channelIds.end())
        return it->second;  // the display label is fixed at first registration
    uint32_t id = r.channels.push(ChannelInfo{name, display ? *display : name});
    r.channelIds.emplace(name, id);
    return id;
}

}  // namespace

Channel Channel::intern(const std::string& name) { return Channel(internChannel(name, nullptr)); }

Channel Channel::intern(const std::string& name, const std::string& display)
{
    return Channel(internChannel(name, &display));
}

const std::string& Channel::name() const { return registry().channels.at(id_).name; }
const std::string& Channel::display() const { return registry().channels.at(id_).display; }

Event::Event(Channel c, const Value& payload)
{
    Registry& r = registry();
    EventKey key{c.id(), payload};
    {
        std::shared_lock lk(r.mu);
        auto it = r.eventIds.find(key);
        if (it != r.eventIds.end()) {
            id_ = it->second;
            return;
        }
    }
    std::unique_lock lk(r.mu);
    auto it = r.eventIds.find(key);
    if (it != r.eventIds.end()) {
        id_ = it->second;
        return;
    }
    id_ = r.events.push(EventInfo{c, payload});
    r.eventIds.emplace(std::move(key), id_);
}

Event::Event(const std::string& channel, const Value& payload) : Event(Channel::intern(channel), payload) {}

Channel Event::channel() const { return registry().events.at(id_).channel; }
const Value& Event::payload() const { return registry().events.at(id_).payload; }

std::string Event::str() const { return channel().display() + " " + payload().str(); }

size_t Event::universeSize()
{
    std::shared_lock lk(registry().mu);
    return registry().events.size();
}

EventSet::EventSet(std::initializer_list<Event> es)
{
    for (Event e : es)
        insert(e);
}

EventSet::EventSet(const std::vector<Event>& es)
{
    for (Event e : es)
        insert(e);
}

void EventSet::insert(Event e)
{
    uint32_t i = e.id();
    if ((i >> 6) >= bits_.size())
        bits_.resize((i >> 6) + 1, 0);
    uint64_t m = 1ULL << (i & 63);
    if (!(bits_[i >> 6] & m)) {
        bits_[i >> 6] |= m;
        ++count_;
    }
}

void EventSet::insert(const EventSet& o)
{
    for (Event e : o.elements())
        insert(e);
}

std::vector<Event> EventSet::elements() const
{
    std::vector<Event> out;
    out.reserve(count_);
    for (size_t w = 0; w < bits_.size(); ++w) {
        uint64_t b = bits_[w];
        while (b) {
            int k = __builtin_ctzll(b);
            out.push_back(Event::fromId(static_cast<uint32_t>(w * 64 + k)));
            b &= b - 1;
        }
    }
    return out;
}

}  // namespace itree
