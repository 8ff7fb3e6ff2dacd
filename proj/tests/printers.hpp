#pragma once

#include "doctest.h"

#include "anim/animator.hpp"
#include "rc/model.hpp"

namespace doctest {
template <>
struct StringMaker<anim::Menu::Kind> {
    static String convert(anim::Menu::Kind k) { return anim::kindName(k); }
};
template <>
struct StringMaker<anim::Report::Outcome> {
    static String convert(anim::Report::Outcome k) { return anim::kindName(k); }
};
template <>
struct StringMaker<rc::Solution::Kind> {
    static String convert(rc::Solution::Kind k) { return rc::kindName(k); }
};
}  // namespace doctest
