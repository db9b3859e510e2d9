#pragma once

#include "solwave/collision.hpp"
#include "solwave/csv.hpp"
#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/kdv.hpp"
#include "solwave/nls.hpp"
#include "solwave/pcs.hpp"
#include "solwave/rng.hpp"
#include "solwave/spectral.hpp"
#include "solwave/squeeze.hpp"
#include "solwave/wavelet.hpp"
#include "solwave/wdm.hpp"
#include "solwave/wft.hpp"
