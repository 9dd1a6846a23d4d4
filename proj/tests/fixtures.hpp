// Generated by tests/oracle/make_fixtures.cpp (continuum shooting oracle).
// Do not edit by hand.
#pragma once

#include <array>

namespace fixtures {

struct FixtureRecord {
  int n;
  double R, H, p;
  double base_height;
  double lambda_star;
  double fold_height;
  double fold_boundary_slope;
  double fold_radial_variation;
  double near_fold_lambda;
  std::array<double, 17> near_fold_profile;  // u(k R / 16), k = 0..16
  double upper_lambda;
  double upper_height;
  double lower_height_at_upper_lambda;
};

inline constexpr FixtureRecord disc_quadratic{
    2, 1, 0.5, 2,
    /*base_height=*/0.12701665379255217,
    /*lambda_star=*/12.926047756217176,
    /*fold_height=*/0.25311253343999851,
    /*fold_boundary_slope=*/0.3983966935891694,
    /*fold_radial_variation=*/0.15961067661636125,
    /*near_fold_lambda=*/12.926037756217177,
    /*near_fold_profile=*/{0.25290537146173364, 0.25161121454016705, 0.24774685726000387, 0.24136648114340761, 0.23255973360819346, 0.22145033555980206, 0.20819341613932754, 0.19297109316179534, 0.17598598335338739, 0.1574526401054161, 0.13758730449774265, 0.11659669957603457, 0.094666777319917975, 0.071952271089285216, 0.048567622696336937, 0.024579420301962682, 2.9858995592886572e-15},
    /*upper_lambda=*/12.279745368406317,
    /*upper_height=*/0.31816479893140948,
    /*lower_height_at_upper_lambda=*/0.20888789649026451};

inline constexpr FixtureRecord interval_linear{
    1, 0.5, 1, 1,
    /*base_height=*/0.13397459621551239,
    /*lambda_star=*/3.1821887723634239,
    /*fold_height=*/0.31788871137290403,
    /*fold_boundary_slope=*/1.6368979780290622,
    /*fold_radial_variation=*/0.31788871137290403,
    /*near_fold_lambda=*/3.1821787723634238,
    /*near_fold_profile=*/{0.31736081630771662, 0.31637870579342214, 0.31342375895837821, 0.30846982500389242, 0.30147228174164503, 0.29236640336256031, 0.28106491595907351, 0.26745456366131293, 0.25139143174850825, 0.23269467817924194, 0.21113821441178865, 0.18643977172469475, 0.15824676552517944, 0.1261186470365922, 0.089506609059231121, 0.047735155425388101, -1.6504267570660591e-15},
    /*upper_lambda=*/3.0230793337452524,
    /*upper_height=*/0.39539101473165522,
    /*lower_height_at_upper_lambda=*/0.259214996104012};

}  // namespace fixtures
