#pragma once

#include "cplxtorsor/appell_humbert.hpp"
#include "cplxtorsor/connections.hpp"
#include "cplxtorsor/grid.hpp"
#include "cplxtorsor/invariant_form.hpp"
#include "cplxtorsor/torsor.hpp"
#include "cplxtorsor/torus.hpp"
#include "cplxtorsor/types.hpp"
