#pragma once

#include "plaudit/assertions.hpp"
#include "plaudit/assorters.hpp"
#include "plaudit/errors.hpp"
#include "plaudit/hesse.hpp"
#include "plaudit/io.hpp"
#include "plaudit/model.hpp"
#include "plaudit/pipeline.hpp"
#include "plaudit/rational.hpp"
#include "plaudit/risk.hpp"
#include "plaudit/social_choice.hpp"
