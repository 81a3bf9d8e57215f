#pragma once

#include "qnet/axioms.hpp"
#include "qnet/canonical.hpp"
#include "qnet/colour.hpp"
#include "qnet/error.hpp"
#include "qnet/fault.hpp"
#include "qnet/fixtures.hpp"
#include "qnet/homomorphism.hpp"
#include "qnet/network.hpp"
#include "qnet/optimizer.hpp"
#include "qnet/quandloid.hpp"
#include "qnet/rewrite.hpp"
#include "qnet/serialize.hpp"
#include "qnet/taint.hpp"
