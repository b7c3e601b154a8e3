#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>

namespace fx {

/// Immutable cons list. Copies share their tails.
template <class T>
class PersistentList {
    struct Node {
        T head;
        // mutable only so the destructor can unlink long chains iteratively
        mutable std::shared_ptr<const Node> tail;

        Node(T h, std::shared_ptr<const Node> t) : head(std::move(h)), tail(std::move(t)) {}
        ~Node() {
            auto next = std::move(tail);
            while (next && next.use_count() == 1) {
                auto after = std::move(next->tail);
                next = std::move(after);
            }
        }
    };

    std::shared_ptr<const Node> node_;
    std::size_t size_ = 0;

    PersistentList(std::shared_ptr<const Node> n, std::size_t size) : node_(std::move(n)), size_(size) {}

public:
    PersistentList() = default;

    bool empty() const { return !node_; }
    std::size_t size() const { return size_; }
    const T& front() const { return node_->head; }

    PersistentList push(T value) const {
        return PersistentList(std::make_shared<const Node>(std::move(value), node_), size_ + 1);
    }
    PersistentList pop() const { return PersistentList(node_->tail, size_ - 1); }

    bool sameAs(const PersistentList& other) const { return node_ == other.node_; }

    template <class F>
    void forEach(F&& f) const {
        for (const Node* n = node_.get(); n; n = n->tail.get()) f(n->head);
    }
};

/// Immutable AVL map with path copying: insert and lookup are O(log n).
template <class K, class V, class Less = std::less<K>>
class PersistentMap {
    struct Node {
        K key;
        V value;
        std::shared_ptr<const Node> left, right;
        int height;
    };
    using Ptr = std::shared_ptr<const Node>;

    Ptr root_;
    std::size_t size_ = 0;

    static int height(const Ptr& n) { return n ? n->height : 0; }

    static Ptr make(const K& k, const V& v, Ptr l, Ptr r) {
        int h = 1 + std::max(height(l), height(r));
        return std::make_shared<const Node>(Node{k, v, std::move(l), std::move(r), h});
    }

    static Ptr rotateRight(const K& k, const V& v, const Ptr& l, const Ptr& r) {
        return make(l->key, l->value, l->left, make(k, v, l->right, r));
    }
    static Ptr rotateLeft(const K& k, const V& v, const Ptr& l, const Ptr& r) {
        return make(r->key, r->value, make(k, v, l, r->left), r->right);
    }

    static Ptr balance(const K& k, const V& v, const Ptr& l, const Ptr& r) {
        int diff = height(l) - height(r);
        if (diff > 1) {
            if (height(l->left) >= height(l->right)) return rotateRight(k, v, l, r);
            const Ptr& pivot = l->right;
            return make(pivot->key, pivot->value, make(l->key, l->value, l->left, pivot->left),
                        make(k, v, pivot->right, r));
        }
        if (diff < -1) {
            if (height(r->right) >= height(r->left)) return rotateLeft(k, v, l, r);
            const Ptr& pivot = r->left;
            return make(pivot->key, pivot->value, make(k, v, l, pivot->left),
                        make(r->key, r->value, pivot->right, r->right));
        }
        return make(k, v, l, r);
    }

    static Ptr insert(const Ptr& n, const K& k, const V& v, bool& added) {
        if (!n) {
            added = true;
            return make(k, v, nullptr, nullptr);
        }
        Less less;
        if (less(k, n->key)) return balance(n->key, n->value, insert(n->left, k, v, added), n->right);
        if (less(n->key, k)) return balance(n->key, n->value, n->left, insert(n->right, k, v, added));
        return make(k, v, n->left, n->right);
    }

    template <class F>
    static void walk(const Node* n, F& f) {
        if (!n) return;
        walk(n->left.get(), f);
        f(n->key, n->value);
        walk(n->right.get(), f);
    }

public:
    PersistentMap() = default;

    bool empty() const { return !root_; }
    std::size_t size() const { return size_; }

    const V* find(const K& k) const {
        Less less;
        for (const Node* n = root_.get(); n;) {
            if (less(k, n->key)) n = n->left.get();
            else if (less(n->key, k)) n = n->right.get();
            else return &n->value;
        }
        return nullptr;
    }

    PersistentMap insert(const K& k, V v) const {
        bool added = false;
        PersistentMap out;
        out.root_ = insert(root_, k, v, added);
        out.size_ = size_ + (added ? 1 : 0);
        return out;
    }

    /// In-order traversal.
    template <class F>
    void forEach(F&& f) const {
        walk(root_.get(), f);
    }

    int depth() const { return height(root_); }
};

}  // namespace fx
