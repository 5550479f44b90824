#ifndef WEIBULLPD_REFERENCE_SETTINGS_H
#define WEIBULLPD_REFERENCE_SETTINGS_H

/* Benchmark settings with published detection probabilities. sigma2 = 1. */
typedef struct wpd_reference_setting {
  int n_pulses;
  double alpha_tilde;
  double mu_tilde;
  double omega_tilde;
  double gamma;
  double published_pd;
} wpd_reference_setting;

static const wpd_reference_setting wpd_reference_settings[10] = {
    {3, 1.0 / 2, 3.0 / 2, 2.0, 3.0, 0.691485},
    {3, 1.0, 1.0, 2.0, 2.0, 0.831095},
    {3, 1.0 / 2, 2.0, 5.0, 3.0, 0.887412},
    {5, 1.0 / 2, 3.0 / 2, 2.0, 2.0, 0.976474},
    {5, 1.0 / 2, 1.0, 2.0, 2.0, 0.902578},
    {5, 1.0, 1.0 / 2, 5.0, 2.0, 0.975109},
    {5, 1.0 / 3, 3.0, 2.0, 2.0, 0.920891},
    {6, 1.0 / 4, 3.0, 1.0, 1.0, 0.999091},
    {6, 1.0 / 5, 2.0, 1.0 / 2, 1.0, 0.999387},
    {5, 1.0 / 2, 3.0 / 2, 2.0, 3.0, 0.999413},
};

#endif
