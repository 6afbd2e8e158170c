#ifndef SOCREC_SOCREC_HPP_
#define SOCREC_SOCREC_HPP_

#include "socrec/core.hpp"
#include "socrec/io.hpp"
#include "socrec/datagen.hpp"
#include "socrec/cf.hpp"
#include "socrec/snrs.hpp"
#include "socrec/eval.hpp"

#endif  // SOCREC_SOCREC_HPP_
