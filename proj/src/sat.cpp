#include "mtsref/sat.hpp"

#include <algorithm>

namespace mtsref {

namespace {

// Luby sequence value for index i (0-based).
std::uint64_t luby(std::uint64_t i) {
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != i) {
        size = (size - 1) >> 1;
        --seq;
        i = i % size;
    }
    return std::uint64_t{1} << seq;
}

}  // namespace

int SatSolver::newVar() {
    const std::uint32_t v = static_cast<std::uint32_t>(assigns_.size());
    assigns_.push_back(-1);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    phase_.push_back(1);  // negative first
    seen_.push_back(0);
    heapPos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heapInsert(v);
    return static_cast<int>(v) + 1;
}

void SatSolver::attach(std::uint32_t cref) {
    const auto& c = clauses_[cref];
    watches_[neg(c[0])].push_back(cref);
    watches_[neg(c[1])].push_back(cref);
}

bool SatSolver::addClause(std::span<const int> dimacs) {
    if (!ok_) return false;
    backtrack(0);
    std::vector<Lit> c;
    c.reserve(dimacs.size());
    for (int d : dimacs) {
        while (static_cast<int>(assigns_.size()) < std::abs(d)) newVar();
        c.push_back(toLit(d));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i + 1 < c.size() && var(c[i]) == var(c[i + 1])) return true;  // tautology
        int v = value(c[i]);
        if (v == 1) return true;
        if (v == -1) kept.push_back(c[i]);
    }
    if (kept.empty()) return ok_ = false;
    if (kept.size() == 1) {
        enqueue(kept[0], -1);
        if (propagate() >= 0) ok_ = false;
        return ok_;
    }
    clauses_.push_back(std::move(kept));
    attach(static_cast<std::uint32_t>(clauses_.size() - 1));
    return true;
}

void SatSolver::enqueue(Lit l, std::int32_t reason) {
    const std::uint32_t v = var(l);
    assigns_[v] = static_cast<std::int8_t>((l & 1u) ? 0 : 1);
    level_[v] = decisionLevel();
    reason_[v] = reason;
    trail_.push_back(l);
}

std::int32_t SatSolver::propagate() {
    while (qhead_ < trail_.size()) {
        const Lit p = trail_[qhead_++];
        auto& ws = watches_[p];
        const Lit falseLit = neg(p);
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            const std::uint32_t cref = ws[i++];
            auto& c = clauses_[cref];
            if (c[0] == falseLit) std::swap(c[0], c[1]);
            if (value(c[0]) == 1) {
                ws[j++] = cref;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k)
                if (value(c[k]) != 0) {
                    std::swap(c[1], c[k]);
                    watches_[neg(c[1])].push_back(cref);
                    moved = true;
                    break;
                }
            if (moved) continue;
            ws[j++] = cref;
            if (value(c[0]) == 0) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return static_cast<std::int32_t>(cref);
            }
            enqueue(c[0], static_cast<std::int32_t>(cref));
        }
        ws.resize(j);
    }
    return -1;
}

void SatSolver::analyze(std::int32_t conflict, std::vector<Lit>& learnt, int& backLevel) {
    learnt.clear();
    learnt.push_back(0);  // asserting literal placeholder
    int pending = 0;
    Lit p = 0;
    bool first = true;
    std::size_t idx = trail_.size();
    std::int32_t cref = conflict;
    for (;;) {
        const auto& c = clauses_[cref];
        for (std::size_t k = first ? 0 : 1; k < c.size(); ++k) {
            const Lit q = c[k];
            const std::uint32_t v = var(q);
            if (seen_[v] || level_[v] == 0) continue;
            seen_[v] = 1;
            bump(v);
            if (level_[v] >= decisionLevel()) ++pending;
            else learnt.push_back(q);
        }
        first = false;
        do {
            p = trail_[--idx];
        } while (!seen_[var(p)]);
        seen_[var(p)] = 0;
        if (--pending == 0) break;
        cref = reason_[var(p)];  // implied literal sits at position 0
    }
    learnt[0] = neg(p);
    for (std::size_t k = 1; k < learnt.size(); ++k) seen_[var(learnt[k])] = 0;
    backLevel = 0;
    if (learnt.size() > 1) {
        std::size_t best = 1;
        for (std::size_t k = 2; k < learnt.size(); ++k)
            if (level_[var(learnt[k])] > level_[var(learnt[best])]) best = k;
        std::swap(learnt[1], learnt[best]);
        backLevel = level_[var(learnt[1])];
    }
    varInc_ /= 0.95;
}

void SatSolver::backtrack(int level) {
    if (decisionLevel() <= level) return;
    for (std::size_t i = trail_.size(); i > trailLim_[level]; --i) {
        const std::uint32_t v = var(trail_[i - 1]);
        phase_[v] = static_cast<std::int8_t>(trail_[i - 1] & 1u);
        assigns_[v] = -1;
        reason_[v] = -1;
        if (heapPos_[v] < 0) heapInsert(v);
    }
    trail_.resize(trailLim_[level]);
    trailLim_.resize(level);
    qhead_ = trail_.size();
}

bool SatSolver::solve(const Deadline* deadline) {
    if (!ok_) return false;
    backtrack(0);
    if (propagate() >= 0) return ok_ = false;
    std::vector<Lit> learnt;
    std::uint64_t restarts = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t budget = 100 * luby(restarts);
    for (;;) {
        const std::int32_t conflict = propagate();
        if (conflict >= 0) {
            ++conflicts;
            if ((conflicts & 255u) == 0) checkDeadline(deadline);
            if (decisionLevel() == 0) return ok_ = false;
            int backLevel = 0;
            analyze(conflict, learnt, backLevel);
            backtrack(backLevel);
            if (learnt.size() == 1) {
                enqueue(learnt[0], -1);
            } else {
                clauses_.push_back(learnt);
                const auto cref = static_cast<std::uint32_t>(clauses_.size() - 1);
                attach(cref);
                enqueue(learnt[0], static_cast<std::int32_t>(cref));
            }
            if (--budget == 0) {
                budget = 100 * luby(++restarts);
                backtrack(0);
            }
            continue;
        }
        std::uint32_t next = UINT32_MAX;
        while (!heap_.empty()) {
            const std::uint32_t v = heapPop();
            if (assigns_[v] < 0) {
                next = v;
                break;
            }
        }
        if (next == UINT32_MAX) {
            model_.assign(assigns_.begin(), assigns_.end());
            backtrack(0);
            return true;
        }
        trailLim_.push_back(trail_.size());
        enqueue(Lit(2 * next + static_cast<std::uint32_t>(phase_[next])), -1);
    }
}

void SatSolver::bump(std::uint32_t v) {
    activity_[v] += varInc_;
    if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        varInc_ *= 1e-100;
    }
    if (heapPos_[v] >= 0) heapUp(static_cast<std::size_t>(heapPos_[v]));
}

void SatSolver::heapInsert(std::uint32_t v) {
    heapPos_[v] = static_cast<std::int64_t>(heap_.size());
    heap_.push_back(v);
    heapUp(heap_.size() - 1);
}

std::uint32_t SatSolver::heapPop() {
    const std::uint32_t top = heap_.front();
    heapPos_[top] = -1;
    const std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heapPos_[last] = 0;
        heapDown(0);
    }
    return top;
}

void SatSolver::heapUp(std::size_t i) {
    const std::uint32_t v = heap_[i];
    while (i > 0) {
        const std::size_t parent = (i - 1) / 2;
        if (activity_[heap_[parent]] >= activity_[v]) break;
        heap_[i] = heap_[parent];
        heapPos_[heap_[i]] = static_cast<std::int64_t>(i);
        i = parent;
    }
    heap_[i] = v;
    heapPos_[v] = static_cast<std::int64_t>(i);
}

void SatSolver::heapDown(std::size_t i) {
    const std::uint32_t v = heap_[i];
    for (;;) {
        std::size_t child = 2 * i + 1;
        if (child >= heap_.size()) break;
        if (child + 1 < heap_.size() && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
        if (activity_[heap_[child]] <= activity_[v]) break;
        heap_[i] = heap_[child];
        heapPos_[heap_[i]] = static_cast<std::int64_t>(i);
        i = child;
    }
    heap_[i] = v;
    heapPos_[v] = static_cast<std::int64_t>(i);
}

}  // namespace mtsref
