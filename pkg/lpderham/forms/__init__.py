from lpderham.forms.exterior import (PolyForm, PolyMap, exterior_derivative, interior_product,
                                     pullback, recombine_dt, split_dt, wedge)
from lpderham.forms.homotopy import (eps_pullback, homotopy_defect, poincare_primitive,
                                     radial_homotopy, random_closed_form, random_polyform)
from lpderham.forms.numeric import (CircularPath, NumericForm, PolygonalPath, from_polyform,
                                    line_integral, pointwise_norm, segment_residual,
                                    winding_form)


def get_form(payload, n):
    """Build a form from a scene payload: a named numeric form or a PolyForm JSON."""
    if isinstance(payload, str):
        name = payload
        if name == 'winding':
            if n != 2:
                raise ValueError('The winding form lives on R^2.')
            return winding_form()
        elif name == 'area':
            return PolyForm(n, n, {tuple(range(n)): 1})
        elif name == 'zero':
            return PolyForm.zero(n, 1)
        else:
            raise ValueError(f'Unknown named form {name!r}.')
    form = PolyForm.from_json(payload)
    if form.n != n or form.has_t:
        raise ValueError(f'Form lives on R^{form.n}, scene on R^{n}.')
    return form
