#pragma once

#include "httplib.h"

// <resolv.h> defines `_res` as a macro, which breaks Eigen's parameter names.
#ifdef _res
#undef _res
#endif
