//------------------------------------------------------------------------------
//
//   Copyright 2026 The entbound Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "entbound/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_zeta.h>

#include <string>

#include "entbound/errors.hpp"

namespace entbound::special {
namespace {

void ensure_handler_off()
{
  static bool const once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

double checked(int status, gsl_sf_result const &result, char const *what)
{
  if (status != GSL_SUCCESS)
  {
    throw DomainError(std::string(what) + ": " + gsl_strerror(status));
  }
  return result.val;
}

}  // namespace

double riemann_zeta(double s)
{
  ensure_handler_off();
  gsl_sf_result result;
  return checked(gsl_sf_zeta_e(s, &result), result, "riemann_zeta");
}

double hurwitz_zeta(double s, double q)
{
  ensure_handler_off();
  gsl_sf_result result;
  return checked(gsl_sf_hzeta_e(s, q, &result), result, "hurwitz_zeta");
}

double log_gamma(double x)
{
  ensure_handler_off();
  gsl_sf_result result;
  return checked(gsl_sf_lngamma_e(x, &result), result, "log_gamma");
}

}  // namespace entbound::special
