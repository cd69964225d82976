#include <stdio.h>
#include "percolab.h"

int main(void) {
  PercolabLattice *lat = NULL;
  if (percolab_lattice_new(2, 1, &lat) != PercolabStatus_Ok) return 1;
  size_t v = 0, e = 0;
  percolab_lattice_counts(lat, &v, &e);
  PercolabConfig *cfg = NULL;
  percolab_config_sample(lat, 1.0, 7, &cfg);
  int32_t hit = 0;
  percolab_connected_to_boundary(lat, cfg, &hit);
  percolab_config_free(cfg);
  percolab_lattice_free(lat);

  PercolabRusso r;
  if (percolab_exact_russo(2, 1, 0.5, &r) != PercolabStatus_Ok) return 2;
  if (percolab_lattice_new(0, 1, &lat) != PercolabStatus_InvalidParameter) return 3;
  printf("%zu %zu %d %.6f %d %s\n", v, e, hit, r.derivative, r.pass, percolab_last_error()[0] ? "err" : "none");
  return 0;
}
