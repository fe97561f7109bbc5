// Umbrella header for the coboson library.

#pragma once

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/driver.hpp"
#include "coboson/errors.hpp"
#include "coboson/extremal.hpp"
#include "coboson/log_domain.hpp"
#include "coboson/schmidt.hpp"
#include "coboson/serialize.hpp"
