#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "itree/itree.hpp"

namespace itree {

using MergeFn = std::function<Choices(const Choices&, const Choices&)>;
using HideList = std::vector<Event>;
using Renaming = FinRel<Event, Event>;
using RenamingSeq = RenSeq<Event, Event>;

// Prefixes and guards
ITree inp(Channel c, const std::vector<Value>& vs);
ITree outp(Channel c, const Value& v = Value::unit());
ITree guard(bool b);

// Choice
ITree genchoice(const ITree& p, const MergeFn& m, const ITree& q);
ITree extchoice(const ITree& p, const ITree& q);
ITree extchoiceBiased(const ITree& p, const ITree& q);
ITree extchoiceAll(const std::vector<ITree>& ps);
MergeFn mergeExclFn();
MergeFn overrideFn();
MergeFn converse(MergeFn m);
bool wellFormedMerge(const MergeFn& m, const Choices& sample);

// Concurrency
ITree parallel(const ITree& p, const ITree& q, std::shared_ptr<const EventSet> sync);
ITree parallel(const ITree& p, const ITree& q, const EventSet& sync);
ITree interleave(const ITree& p, const ITree& q);

// Hiding
ITree hide(const ITree& p, std::shared_ptr<const EventSet> a);
ITree hide(const ITree& p, const EventSet& a);
ITree hidep(const ITree& p, const HideList& el);
// literal left fold of single-event hides, kept as a reference
ITree hidepFold(const ITree& p, const HideList& el);

// Renaming
ITree rename(const ITree& p, const Renaming& rho);
ITree renamep(const ITree& p, const RenamingSeq& rs);
// direct transcription of the renamep equation, kept as a reference
ITree renamepSpec(const ITree& p, const RenamingSeq& rs);

// Interrupt and exception
ITree interrupt(const ITree& p, const ITree& q);
ITree exception(const ITree& p, std::shared_ptr<const EventSet> a, const ITree& q);
ITree exception(const ITree& p, const EventSet& a, const ITree& q);

}  // namespace itree
