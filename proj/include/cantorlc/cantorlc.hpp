#pragma once

#include "cantorlc/bigreal.hpp"
#include "cantorlc/bounds.hpp"
#include "cantorlc/cantor.hpp"
#include "cantorlc/descriptor.hpp"
#include "cantorlc/error.hpp"
#include "cantorlc/geometry.hpp"
#include "cantorlc/julia.hpp"
#include "cantorlc/lebesgue.hpp"
#include "cantorlc/nodes.hpp"
#include "cantorlc/numerics.hpp"
#include "cantorlc/parallel.hpp"
