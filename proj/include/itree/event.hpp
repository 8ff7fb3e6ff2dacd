#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "itree/value.hpp"

namespace itree {

// Interned channel name. Display is the label shown in menus.
class Channel {
public:
    Channel() = default;
    static Channel intern(const std::string& name);
    static Channel intern(const std::string& name, const std::string& display);

    uint32_t id() const { return id_; }
    const std::string& name() const;
    const std::string& display() const;

    bool operator==(const Channel& o) const { return id_ == o.id_; }
    bool operator!=(const Channel& o) const { return id_ != o.id_; }

private:
    explicit Channel(uint32_t id) : id_(id) {}
    uint32_t id_ = 0;
};

// Interned (channel, payload) pair; equality is id equality.
class Event {
public:
    Event() = default;
    Event(Channel c, const Value& payload);
    Event(const std::string& channel, const Value& payload = Value::unit());

    uint32_t id() const { return id_; }
    Channel channel() const;
    const Value& payload() const;
    std::string str() const;

    bool operator==(const Event& o) const { return id_ == o.id_; }
    bool operator!=(const Event& o) const { return id_ != o.id_; }
    bool operator<(const Event& o) const { return id_ < o.id_; }

    static size_t universeSize();
    // id must have been produced by an interned event
    static Event fromId(uint32_t id)
    {
        Event e;
        e.id_ = id;
        return e;
    }

private:
    uint32_t id_ = 0;
};

// Dense bitset over interned event ids.
class EventSet {
public:
    EventSet() = default;
    EventSet(std::initializer_list<Event> es);
    explicit EventSet(const std::vector<Event>& es);

    void insert(Event e);
    void insert(const EventSet& o);
    bool contains(Event e) const
    {
        uint32_t i = e.id();
        return (i >> 6) < bits_.size() && ((bits_[i >> 6] >> (i & 63)) & 1ULL);
    }
    bool empty() const { return count_ == 0; }
    size_t size() const { return count_; }
    std::vector<Event> elements() const;

private:
    std::vector<uint64_t> bits_;
    size_t count_ = 0;
};

}  // namespace itree

template <>
struct std::hash<itree::Event> {
    size_t operator()(const itree::Event& e) const noexcept { return e.id(); }
};
