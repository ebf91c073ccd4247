#pragma once

#include "rpl/lang/resources.hpp"
#include "rpl/lang/value.hpp"
#include "rpl/sim/compile.hpp"

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rpl::sim {

using Time = std::int64_t;

/// Point from which a task's `dl` budget is measured.
enum class DeadlineAnchor { Enable, Issue };
/// How an idle actor picks among several ready tasks in simulation mode.
enum class ReadyPolicy { Random, Fifo };

struct CallSite {
    std::string method;
    int line = 0;
    auto operator<=>(const CallSite&) const = default;
};

enum class TaskState : std::uint8_t {
    Pending,      // waiting for `after` futures
    Ready,        // in its actor's ready queue
    Active,       // owns its actor and can run now
    Working,      // inside a cost span
    GetBlocked,   // owns its actor, waiting on a future
    AwaitBlocked, // released its actor, waiting on a future
    HoldBlocked,  // released its actor, waiting for resources
    Done,
};

struct Task {
    std::uint32_t id = 0;
    std::uint32_t actor = 0;
    const MethodCode* code = nullptr;
    std::vector<lang::Value> locals;
    std::size_t pc = 0;
    TaskState state = TaskState::Pending;
    std::uint32_t future = 0;
    std::vector<std::uint32_t> after;
    std::uint32_t waiting_on = 0;
    Time issue_time = 0;
    Time enable_time = -1;
    Time dl = 0;
    Time deadline = -1;  // absolute; -1 for main
    Time work_until = 0;
    CallSite site;
    std::vector<lang::ResourceRequest> blocked_request;
    std::vector<std::int64_t> draws;  // random outcomes for the statement being evaluated
};

struct Actor {
    std::uint32_t id = 0;
    int class_index = -1;  // -1 for the main object
    std::vector<lang::Value> fields;
    std::optional<std::uint32_t> active;
    std::deque<std::uint32_t> ready;
};

struct MachineOptions {
    /// Offer every runnable task, across all actors, as a choice.
    bool explore = false;
    DeadlineAnchor anchor = DeadlineAnchor::Enable;
    ReadyPolicy ready_policy = ReadyPolicy::Random;
    std::uint64_t step_limit = 10'000'000;
};

enum class ChoiceKind { Schedule, Random };

struct Choice {
    ChoiceKind kind = ChoiceKind::Schedule;
    std::size_t arity = 0;
};

enum class RunStatus { NeedChoice, Finished, Deadlocked };

/// Timed actor interpreter. Every nondeterministic decision is surfaced as a
/// Choice, so the same machine serves seeded simulation and exhaustive search.
/// Machines are plain values: copying one forks the execution.
class Machine {
public:
    Machine(std::shared_ptr<const CompiledProgram> program, lang::ResourcePool pool, MachineOptions options = {});

    /// Runs until a choice is needed, main completes, or nothing can progress.
    RunStatus run();
    const Choice& choice() const { return *pending_; }
    void choose(std::size_t option);

    Time now() const { return now_; }
    bool finished() const { return finished_; }
    std::int64_t financial_cost() const { return financial_; }
    Time total_work() const { return total_work_; }
    const std::map<CallSite, int>& violations() const { return violations_; }
    const std::vector<std::int64_t>& random_draws() const { return draw_log_; }
    const std::vector<std::string>& categories() const { return categories_; }
    const std::vector<int>& held() const { return held_; }
    const std::vector<int>& peak() const { return peak_; }
    /// Forget the recorded peak, keeping only what is held right now.
    void reset_peak() { peak_ = held_; }
    /// Ids of resources still held.
    std::vector<int> held_resources() const;
    /// Why the last run() returned Deadlocked.
    const std::string& deadlock_reason() const { return deadlock_reason_; }
    /// Clock-free description of the configuration, for memoisation.
    std::string state_key() const;

private:
    std::shared_ptr<const CompiledProgram> program_;
    lang::ResourcePool pool_;
    MachineOptions options_;
    std::vector<std::string> categories_;
    std::vector<int> category_of_;  // per resource index

    std::vector<Task> tasks_;
    std::vector<Actor> actors_;
    std::vector<std::optional<lang::Value>> futures_;
    std::vector<long> holder_;  // per resource index, task id or -1
    std::deque<std::uint32_t> hold_waiters_;
    std::vector<int> held_;
    std::vector<int> peak_;

    Time now_ = 0;
    Time total_work_ = 0;
    std::int64_t financial_ = 0;
    std::map<CallSite, int> violations_;
    std::vector<std::int64_t> draw_log_;
    bool finished_ = false;
    std::string deadlock_reason_;

    std::optional<Choice> pending_;
    std::vector<std::uint32_t> candidates_;
    std::optional<std::uint32_t> resume_;  // task waiting for a random outcome

    struct NeedRandom {
        std::int64_t bound;
    };
    struct Eval;

    void settle();
    void enqueue(Task& t);
    void collect_candidates();
    bool advance_clock();
    void start(std::uint32_t task_id);
    void run_slice(std::uint32_t task_id);
    void step(std::uint32_t task_id, bool& yield);
    void finish_task(Task& t, lang::Value value);
    bool try_hold(Task& t, const std::vector<lang::ResourceRequest>& request, lang::Value& out);
    void retry_holds();
    void store(Task& t, const VarRef& ref, lang::Value v);
    const lang::Value& load(const Task& t, const VarRef& ref) const;
    std::uint32_t future_of(const Task& t, const VarRef& ref, int line) const;
    std::uint32_t create_actor(int class_index);
};

} // namespace rpl::sim
