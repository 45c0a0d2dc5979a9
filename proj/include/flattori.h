/* C interface of the flat torus construction kit. All handles are opaque; every
   call returns an ft_status and leaves a message for ft_last_error() on failure. */
#ifndef FLATTORI_H
#define FLATTORI_H

#include <stddef.h>

#if defined(_WIN32)
#define FT_API __declspec(dllexport)
#else
#define FT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ft_status {
  FT_OK = 0,
  FT_E_DOMAIN,
  FT_E_INFEASIBLE,
  FT_E_CENSUS,
  FT_E_NON_MANIFOLD,
  FT_E_CONE_ANGLE,
  FT_E_BUDGET,
  FT_E_FOLD_SEARCH,
  FT_E_COVERAGE,
  FT_E_IO,
  FT_E_USAGE,
  FT_E_INTERNAL,
  FT_E_NULL_ARGUMENT
} ft_status;

typedef enum ft_method {
  FT_METHOD_AUTO = 0,
  FT_METHOD_DIPLOTORUS,
  FT_METHOD_ZALGALLER_LONG,
  FT_METHOD_BZ_CONFORMAL,
  FT_METHOD_UNIVERSAL
} ft_method;

typedef enum ft_layout { FT_LAYOUT_LONG = 0, FT_LAYOUT_SHORT, FT_LAYOUT_MERGED } ft_layout;

typedef struct ft_mesh ft_mesh;

/* Zero fields select defaults. n and d pin a diplotorus family (solve for a, h);
   h is the gasket height of the long route; face_budget caps the BZ route. */
typedef struct ft_embed_options {
  int n, d;
  double h;
  long face_budget;
} ft_embed_options;

typedef struct ft_choice {
  int long_route; /* 1: long torus, 0: diplotorus */
  int mirror;
  int n, d;
  long long gamma[4];     /* a b c d */
  long long reduction[4];
  double reduced[2], target[2];
} ft_choice;

typedef struct ft_report {
  double isometry_max_rel_error;
  double flatness_max_defect;
  long self_intersections;
  int V, E, F, chi, closed, orientable, simplicial;
  int has_modulus;
  double modulus[2]; /* reduced */
} ft_report;

typedef struct ft_census {
  int short_per_period, short_intersections, short_vertices, short_triangles, short_chi;
  int E_c, V_ext[3], V_long, V_c, V_c_new, V_d, V_cap, central_edges, short_originals;
  int merged_vertices, merged_triangles, merged_chi;
  int long_triangles, long_chi;
} ft_census;

typedef struct ft_coverage_result {
  long samples, realized, failures;
  double max_residual, min_margin;
} ft_coverage_result;

FT_API const char* ft_status_name(ft_status s);
/* Message of the last failing call on this thread ("" if none). */
FT_API const char* ft_last_error(void);

FT_API ft_status ft_reduce(double re, double im, double out[2], long long matrix[4]);
FT_API ft_status ft_select(double re, double im, ft_choice* out);

FT_API ft_status ft_embed(double re, double im, ft_method method, const ft_embed_options* opt, ft_mesh** out);
FT_API ft_status ft_mesh_load(const char* path, ft_mesh** out);
/* .obj / .off also write PATH.ident.json; .json writes the triangulation only. */
FT_API ft_status ft_mesh_save(const ft_mesh* m, const char* path);
FT_API void ft_mesh_free(ft_mesh* m);
FT_API int ft_mesh_vertex_count(const ft_mesh* m);
FT_API int ft_mesh_face_count(const ft_mesh* m);
FT_API ft_status ft_mesh_vertices(const ft_mesh* m, double* xyz);
FT_API ft_status ft_mesh_faces(const ft_mesh* m, int* ijk);
/* Modulus the mesh was built for (or read from its sidecar); FT_E_DOMAIN when unknown. */
FT_API ft_status ft_mesh_tau(const ft_mesh* m, double out[2]);
/* Short description of the route that built the mesh. */
FT_API const char* ft_mesh_route(const ft_mesh* m);

FT_API ft_status ft_verify(const ft_mesh* m, ft_report* out);

FT_API ft_status ft_universal_census(ft_census* out);
FT_API ft_status ft_universal_emit(ft_layout which, const char* path);

FT_API ft_status ft_coverage(long samples, unsigned long long seed, ft_coverage_result* out);

#ifdef __cplusplus
}
#endif

#endif
