#pragma once

#include <string>
#include <vector>

#include "periscope/ellipse.hpp"
#include "periscope/mirror.hpp"
#include "periscope/verifier.hpp"

namespace periscope {

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

/// OBJ text of the height field over the patch domain, m x m vertices with
/// quad faces. Discs use a square-to-disc grid, intervals are extruded in x2,
/// other domains keep the bounding-box quads whose corners lie inside.
std::string patch_obj(const MirrorPatch& patch, int m = 65);

/// ray_id,bounce_index,x,y,z with bounces + 2 rows per ray: the start on the
/// entry plane, each reflection, and the end on the exit plane.
std::string trace_csv(const MirrorSystem& system, const std::vector<TraceResult>& traces);

/// alpha,beta,xy rows of the ellipse pencil map.
std::string pencil_csv(const std::vector<PencilRow>& rows);

/// RFC 4180 quoting for a single field.
std::string csv_field(const std::string& s);

}  // namespace periscope
