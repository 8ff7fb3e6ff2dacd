#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <new>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace itree {

namespace detail {

// Vector with inline room for N elements; relations built per menu are
// short, so most never touch the heap.
template <typename T, size_t N>
class SmallVec {
public:
    SmallVec() = default;
    SmallVec(const SmallVec& o)
    {
        reserve(o.size_);
        std::uninitialized_copy_n(o.data_, o.size_, data_);
        size_ = o.size_;
    }
    SmallVec(SmallVec&& o) noexcept { take(std::move(o)); }
    SmallVec& operator=(const SmallVec& o)
    {
        if (this != &o) {
            SmallVec t(o);
            reset();
            take(std::move(t));
        }
        return *this;
    }
    SmallVec& operator=(SmallVec&& o) noexcept
    {
        if (this != &o) {
            reset();
            take(std::move(o));
        }
        return *this;
    }
    ~SmallVec() { reset(); }

    template <typename... Args>
    void emplace_back(Args&&... args)
    {
        if (size_ == cap_) {
            T tmp(std::forward<Args>(args)...);  // args may alias an element
            grow(cap_ * 2);
            new (data_ + size_) T(std::move(tmp));
        } else {
            new (data_ + size_) T(std::forward<Args>(args)...);
        }
        ++size_;
    }
    void reserve(size_t n)
    {
        if (n > cap_)
            grow(n);
    }

    size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const T* begin() const { return data_; }
    const T* end() const { return data_ + size_; }
    const T& operator[](size_t i) const { return data_[i]; }
    bool operator==(const SmallVec& o) const { return std::equal(begin(), end(), o.begin(), o.end()); }

private:
    T* inlineData() { return reinterpret_cast<T*>(buf_); }
    bool isInline() const { return data_ == reinterpret_cast<const T*>(buf_); }

    void grow(size_t n)
    {
        T* p = static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(alignof(T))));
        std::uninitialized_move_n(data_, size_, p);
        std::destroy_n(data_, size_);
        if (!isInline())
            ::operator delete(data_, std::align_val_t(alignof(T)));
        data_ = p;
        cap_ = n;
    }
    // leaves this empty and inline
    void reset()
    {
        std::destroy_n(data_, size_);
        if (!isInline())
            ::operator delete(data_, std::align_val_t(alignof(T)));
        data_ = inlineData();
        size_ = 0;
        cap_ = N;
    }
    // this must be empty and inline
    void take(SmallVec&& o)
    {
        if (o.isInline()) {
            std::uninitialized_move_n(o.data_, o.size_, data_);
            size_ = o.size_;
            o.reset();
        } else {
            data_ = o.data_;
            size_ = o.size_;
            cap_ = o.cap_;
            o.data_ = o.inlineData();
            o.size_ = 0;
            o.cap_ = N;
        }
    }

    alignas(T) unsigned char buf_[N * sizeof(T)];
    T* data_ = inlineData();
    size_t size_ = 0;
    size_t cap_ = N;
};

// Positions 0..n-1 ordered by key, ties by position; short inputs stay on
// the stack.
class SortedPositions {
public:
    template <typename Key>
    SortedPositions(size_t n, Key key) : n_(n)
    {
        if (n > small_.size()) {
            large_.resize(n);
            data_ = large_.data();
        }
        for (size_t i = 0; i < n; ++i)
            data_[i] = static_cast<uint32_t>(i);
        std::sort(data_, data_ + n, [&](uint32_t a, uint32_t b) {
            if (key(a) < key(b))
                return true;
            if (key(b) < key(a))
                return false;
            return a < b;
        });
    }
    size_t size() const { return n_; }
    uint32_t operator[](size_t i) const { return data_[i]; }

private:
    size_t n_;
    std::array<uint32_t, 32> small_;
    std::vector<uint32_t> large_;
    uint32_t* data_ = small_.data();
};

// Per-position flags, on the stack for short inputs.
class Flags {
public:
    explicit Flags(size_t n)
    {
        if (n > small_.size())
            large_.resize(n);
        data_ = n > small_.size() ? large_.data() : small_.data();
        std::fill(data_, data_ + n, uint8_t{0});
    }
    uint8_t& operator[](size_t i) { return data_[i]; }

private:
    std::array<uint8_t, 32> small_;
    std::vector<uint8_t> large_;
    uint8_t* data_;
};


// Membership index over a key list; linear for small lists, hashed otherwise.
template <typename K>
class KeyIndex {
public:
    template <typename It>
    KeyIndex(It first, It last)
    {
        for (; first != last; ++first)
            keys_.push_back(first->first);
        if (keys_.size() > 8)
            set_.insert(keys_.begin(), keys_.end());
    }
    bool contains(const K& k) const
    {
        if (keys_.size() > 8)
            return set_.count(k) != 0;
        for (const K& x : keys_)
            if (x == k)
                return true;
        return false;
    }

private:
    std::vector<K> keys_;
    std::unordered_set<K> set_;
};

}  // namespace detail

// Finite partial function as an association list with unique keys.
// Iteration order is construction order.
template <typename K, typename V>
class FinMap {
public:
    using Entry = std::pair<K, V>;
    using const_iterator = typename std::vector<Entry>::const_iterator;

    FinMap() = default;
    FinMap(std::initializer_list<Entry> es)
    {
        for (const auto& e : es)
            insert(e.first, e.second);
    }

    // Adds a maplet; the key must be new.
    void insert(const K& k, V v)
    {
        if (contains(k))
            throw std::invalid_argument("duplicate key in finite map");
        entries_.emplace_back(k, std::move(v));
    }
    // Adds a maplet whose key the caller guarantees to be new.
    void append(const K& k, V v) { entries_.emplace_back(k, std::move(v)); }

    const V* find(const K& k) const
    {
        for (const auto& e : entries_)
            if (e.first == k)
                return &e.second;
        return nullptr;
    }
    const V& at(const K& k) const
    {
        const V* v = find(k);
        if (!v)
            throw std::out_of_range("key not in finite map");
        return *v;
    }
    bool contains(const K& k) const { return find(k) != nullptr; }

    std::vector<K> keys() const
    {
        std::vector<K> ks;
        ks.reserve(entries_.size());
        for (const auto& e : entries_)
            ks.push_back(e.first);
        return ks;
    }

    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }
    const Entry& operator[](size_t i) const { return entries_[i]; }
    void reserve(size_t n) { entries_.reserve(n); }

    detail::KeyIndex<K> index() const { return detail::KeyIndex<K>(entries_.begin(), entries_.end()); }

private:
    std::vector<Entry> entries_;
};

// f ⊕ g: g wins on overlap; f's order first, then g's new keys.
template <typename K, typename V>
FinMap<K, V> override(const FinMap<K, V>& f, const FinMap<K, V>& g)
{
    if (g.empty())
        return f;
    if (f.empty())
        return g;
    FinMap<K, V> out;
    out.reserve(f.size() + g.size());
    auto fi = f.index();
    std::unordered_map<K, const V*> gv;
    for (const auto& [k, v] : g)
        gv.emplace(k, &v);
    for (const auto& [k, v] : f) {
        auto it = gv.find(k);
        out.append(k, it == gv.end() ? v : *it->second);
    }
    for (const auto& [k, v] : g)
        if (!fi.contains(k))
            out.append(k, v);
    return out;
}

// A ◁ f
template <typename Set, typename K, typename V>
FinMap<K, V> domRestrict(const Set& a, const FinMap<K, V>& f)
{
    FinMap<K, V> out;
    for (const auto& [k, v] : f)
        if (a.contains(k))
            out.append(k, v);
    return out;
}

// A ⩤ f
template <typename Set, typename K, typename V>
FinMap<K, V> antiRestrict(const Set& a, const FinMap<K, V>& f)
{
    FinMap<K, V> out;
    for (const auto& [k, v] : f)
        if (!a.contains(k))
            out.append(k, v);
    return out;
}

// f ⊙ g = (dom g ⩤ f) ⊕ (dom f ⩤ g)
template <typename K, typename V>
FinMap<K, V> mergeExcl(const FinMap<K, V>& f, const FinMap<K, V>& g)
{
    if (g.empty())
        return f;
    if (f.empty())
        return g;
    auto fi = f.index();
    auto gi = g.index();
    return override(antiRestrict(gi, f), antiRestrict(fi, g));
}

// Finite relation: list of distinct pairs.
template <typename A, typename B>
class FinRel {
public:
    using Pair = std::pair<A, B>;
    using const_iterator = const Pair*;

    FinRel() = default;
    FinRel(std::initializer_list<Pair> ps)
    {
        for (const auto& p : ps)
            insert(p.first, p.second);
    }

    void insert(const A& a, const B& b)
    {
        if (!contains(a, b))
            pairs_.emplace_back(a, b);
    }
    bool contains(const A& a, const B& b) const
    {
        for (const auto& p : pairs_)
            if (p.first == a && p.second == b)
                return true;
        return false;
    }

    size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const_iterator begin() const { return pairs_.begin(); }
    const_iterator end() const { return pairs_.end(); }
    const Pair& operator[](size_t i) const { return pairs_[i]; }

    // unchecked append for callers that already guarantee distinctness
    void append(const A& a, const B& b) { pairs_.emplace_back(a, b); }
    void reserve(size_t n) { pairs_.reserve(n); }

private:
    detail::SmallVec<Pair, 8> pairs_;
};

template <typename A, typename B>
FinRel<B, A> inverse(const FinRel<A, B>& r)
{
    FinRel<B, A> out;
    out.reserve(r.size());
    for (const auto& [a, b] : r)
        out.append(b, a);
    return out;
}

template <typename Set, typename A, typename B>
FinRel<A, B> domRestrict(const Set& s, const FinRel<A, B>& r)
{
    FinRel<A, B> out;
    for (const auto& [a, b] : r)
        if (s.contains(a))
            out.append(a, b);
    return out;
}

template <typename Set, typename A, typename B>
FinRel<A, B> antiRestrict(const Set& s, const FinRel<A, B>& r)
{
    FinRel<A, B> out;
    for (const auto& [a, b] : r)
        if (!s.contains(a))
            out.append(a, b);
    return out;
}

// Largest functional subrelation: keeps (x,y) iff x relates to y alone.
template <typename A, typename B>
FinRel<A, B> mkFunctional(const FinRel<A, B>& r)
{
    const size_t n = r.size();
    detail::SortedPositions pos(n, [&](uint32_t i) -> const A& { return r[i].first; });
    detail::Flags keep(n);
    for (size_t g = 0; g < n;) {
        size_t e = g + 1;
        bool unique = true;
        while (e < n && r[pos[e]].first == r[pos[g]].first) {
            unique = unique && r[pos[e]].second == r[pos[g]].second;
            ++e;
        }
        for (size_t k = g; k < e; ++k)
            keep[pos[k]] = unique;
        g = e;
    }
    FinRel<A, B> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        if (keep[i])
            out.append(r[i].first, r[i].second);
    return out;
}

// F ∘ R for functional R : B ⇸ A, giving B ⇸ V in R's order.
template <typename A, typename B, typename V>
FinMap<B, V> compose(const FinMap<A, V>& f, const FinRel<B, A>& r)
{
    FinMap<B, V> out;
    for (const auto& [b, a] : r)
        if (const V* v = f.find(a))
            out.insert(b, *v);
    return out;
}

// Indexed sequence of pairs; the index of an item is its position.
template <typename A, typename B>
class RenSeq {
public:
    using Pair = std::pair<A, B>;
    using const_iterator = const Pair*;

    RenSeq() = default;
    RenSeq(std::initializer_list<Pair> ps)
    {
        for (const auto& p : ps)
            push(p.first, p.second);
    }

    void push(const A& a, const B& b)
    {
        for (const auto& p : items_)
            if (p.first == a && p.second == b)
                throw std::invalid_argument("duplicate pair in renaming sequence");
        items_.emplace_back(a, b);
    }
    void append(const A& a, const B& b) { items_.emplace_back(a, b); }
    void reserve(size_t n) { items_.reserve(n); }

    size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const_iterator begin() const { return items_.begin(); }
    const_iterator end() const { return items_.end(); }
    const Pair& operator[](size_t i) const { return items_[i]; }
    bool operator==(const RenSeq& o) const { return items_ == o.items_; }

private:
    detail::SmallVec<Pair, 8> items_;
};

// A ◁ₗ ϱ: filter by source, then squash indices.
template <typename Set, typename A, typename B>
RenSeq<A, B> dresl(const Set& s, const RenSeq<A, B>& rs)
{
    RenSeq<A, B> out;
    for (size_t i = 0; i < rs.size(); ++i)
        if (s.contains(rs[i].first)) {
            if (out.empty())
                out.reserve(rs.size() - i);
            out.append(rs[i].first, rs[i].second);
        }
    return out;
}

// Keep the least-index item for every target.
template <typename A, typename B>
RenSeq<A, B> dropDup(const RenSeq<A, B>& rs)
{
    const size_t n = rs.size();
    detail::SortedPositions pos(n, [&](uint32_t i) -> const B& { return rs[i].second; });
    detail::Flags keep(n);
    // ties are ordered by position, so each group starts with its least index
    for (size_t k = 0; k < n; ++k)
        keep[pos[k]] = k == 0 || !(rs[pos[k]].second == rs[pos[k - 1]].second);
    RenSeq<A, B> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        if (keep[i])
            out.append(rs[i].first, rs[i].second);
    return out;
}

template <typename A, typename B>
FinRel<A, B> ran(const RenSeq<A, B>& rs)
{
    FinRel<A, B> out;
    out.reserve(rs.size());
    for (const auto& [a, b] : rs)
        out.insert(a, b);
    return out;
}

}  // namespace itree
