"""Bundled IFC4 class subset: hierarchy and ordered attribute names.

Covers the classes the high-level modelling tools emit plus common query
targets. Each entry maps UPPERCASE class name to (parent, direct attrs).
Unknown classes still parse; they are simply exempt from arity checks and
never considered rooted.
"""

from __future__ import annotations

from functools import lru_cache

# class -> (parent class or None, direct attribute names in schema order)
CLASSES: dict[str, tuple[str | None, tuple[str, ...]]] = {
    # kernel
    "IFCROOT": (None, ("GlobalId", "OwnerHistory", "Name", "Description")),
    "IFCOBJECTDEFINITION": ("IFCROOT", ()),
    "IFCOBJECT": ("IFCOBJECTDEFINITION", ("ObjectType",)),
    "IFCCONTEXT": ("IFCOBJECTDEFINITION", ("ObjectType", "LongName", "Phase", "RepresentationContexts", "UnitsInContext")),
    "IFCPROJECT": ("IFCCONTEXT", ()),
    "IFCPRODUCT": ("IFCOBJECT", ("ObjectPlacement", "Representation")),
    # spatial structure
    "IFCSPATIALELEMENT": ("IFCPRODUCT", ("LongName",)),
    "IFCSPATIALSTRUCTUREELEMENT": ("IFCSPATIALELEMENT", ("CompositionType",)),
    "IFCSITE": ("IFCSPATIALSTRUCTUREELEMENT", ("RefLatitude", "RefLongitude", "RefElevation", "LandTitleNumber", "SiteAddress")),
    "IFCBUILDING": ("IFCSPATIALSTRUCTUREELEMENT", ("ElevationOfRefHeight", "ElevationOfTerrain", "BuildingAddress")),
    "IFCBUILDINGSTOREY": ("IFCSPATIALSTRUCTUREELEMENT", ("Elevation",)),
    "IFCSPACE": ("IFCSPATIALSTRUCTUREELEMENT", ("PredefinedType", "ElevationWithFlooring")),
    # elements
    "IFCELEMENT": ("IFCPRODUCT", ("Tag",)),
    "IFCBUILDINGELEMENT": ("IFCELEMENT", ()),
    "IFCWALL": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCWALLSTANDARDCASE": ("IFCWALL", ()),
    "IFCSLAB": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCBEAM": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCCOLUMN": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCROOF": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCCOVERING": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCMEMBER": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCPLATE": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCFOOTING": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCRAILING": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCSTAIR": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCCURTAINWALL": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCDOOR": ("IFCBUILDINGELEMENT", ("OverallHeight", "OverallWidth", "PredefinedType", "OperationType", "UserDefinedOperationType")),
    "IFCWINDOW": ("IFCBUILDINGELEMENT", ("OverallHeight", "OverallWidth", "PredefinedType", "PartitioningType", "UserDefinedPartitioningType")),
    "IFCBUILDINGELEMENTPROXY": ("IFCBUILDINGELEMENT", ("PredefinedType",)),
    "IFCFURNISHINGELEMENT": ("IFCELEMENT", ()),
    "IFCFEATUREELEMENT": ("IFCELEMENT", ()),
    "IFCFEATUREELEMENTSUBTRACTION": ("IFCFEATUREELEMENT", ()),
    "IFCOPENINGELEMENT": ("IFCFEATUREELEMENTSUBTRACTION", ("PredefinedType",)),
    # relationships
    "IFCRELATIONSHIP": ("IFCROOT", ()),
    "IFCRELDECOMPOSES": ("IFCRELATIONSHIP", ()),
    "IFCRELAGGREGATES": ("IFCRELDECOMPOSES", ("RelatingObject", "RelatedObjects")),
    "IFCRELCONNECTS": ("IFCRELATIONSHIP", ()),
    "IFCRELCONTAINEDINSPATIALSTRUCTURE": ("IFCRELCONNECTS", ("RelatedElements", "RelatingStructure")),
    "IFCRELVOIDSELEMENT": ("IFCRELCONNECTS", ("RelatingBuildingElement", "RelatedOpeningElement")),
    "IFCRELFILLSELEMENT": ("IFCRELCONNECTS", ("RelatingOpeningElement", "RelatedBuildingElement")),
    "IFCRELDEFINES": ("IFCRELATIONSHIP", ()),
    "IFCRELDEFINESBYPROPERTIES": ("IFCRELDEFINES", ("RelatedObjects", "RelatingPropertyDefinition")),
    "IFCRELDEFINESBYTYPE": ("IFCRELDEFINES", ("RelatedObjects", "RelatingType")),
    "IFCRELASSOCIATES": ("IFCRELATIONSHIP", ("RelatedObjects",)),
    "IFCRELASSOCIATESMATERIAL": ("IFCRELASSOCIATES", ("RelatingMaterial",)),
    "IFCRELDECLARES": ("IFCRELATIONSHIP", ("RelatingContext", "RelatedDefinitions")),
    # property sets
    "IFCPROPERTYDEFINITION": ("IFCROOT", ()),
    "IFCPROPERTYSETDEFINITION": ("IFCPROPERTYDEFINITION", ()),
    "IFCPROPERTYSET": ("IFCPROPERTYSETDEFINITION", ("HasProperties",)),
    "IFCPROPERTY": (None, ("Name", "Description")),
    "IFCSIMPLEPROPERTY": ("IFCPROPERTY", ()),
    "IFCPROPERTYSINGLEVALUE": ("IFCSIMPLEPROPERTY", ("NominalValue", "Unit")),
    # type objects
    "IFCTYPEOBJECT": ("IFCROOT", ("ApplicableOccurrence", "HasPropertySets")),
    "IFCTYPEPRODUCT": ("IFCTYPEOBJECT", ("RepresentationMaps", "Tag")),
    "IFCELEMENTTYPE": ("IFCTYPEPRODUCT", ("ElementType",)),
    "IFCWALLTYPE": ("IFCELEMENTTYPE", ("PredefinedType",)),
    # actors and ownership
    "IFCOWNERHISTORY": (None, ("OwningUser", "OwningApplication", "State", "ChangeAction", "LastModifiedDate", "LastModifyingUser", "LastModifyingApplication", "CreationDate")),
    "IFCPERSON": (None, ("Identification", "FamilyName", "GivenName", "MiddleNames", "PrefixTitles", "SuffixTitles", "Roles", "Addresses")),
    "IFCORGANIZATION": (None, ("Identification", "Name", "Description", "Roles", "Addresses")),
    "IFCPERSONANDORGANIZATION": (None, ("ThePerson", "TheOrganization", "Roles")),
    "IFCAPPLICATION": (None, ("ApplicationDeveloper", "Version", "ApplicationFullName", "ApplicationIdentifier")),
    # geometry and placement resources
    "IFCREPRESENTATIONITEM": (None, ()),
    "IFCGEOMETRICREPRESENTATIONITEM": ("IFCREPRESENTATIONITEM", ()),
    "IFCPOINT": ("IFCGEOMETRICREPRESENTATIONITEM", ()),
    "IFCCARTESIANPOINT": ("IFCPOINT", ("Coordinates",)),
    "IFCDIRECTION": ("IFCGEOMETRICREPRESENTATIONITEM", ("DirectionRatios",)),
    "IFCPLACEMENT": ("IFCGEOMETRICREPRESENTATIONITEM", ("Location",)),
    "IFCAXIS2PLACEMENT2D": ("IFCPLACEMENT", ("RefDirection",)),
    "IFCAXIS2PLACEMENT3D": ("IFCPLACEMENT", ("Axis", "RefDirection")),
    "IFCOBJECTPLACEMENT": (None, ()),
    "IFCLOCALPLACEMENT": ("IFCOBJECTPLACEMENT", ("PlacementRelTo", "RelativePlacement")),
    "IFCREPRESENTATIONCONTEXT": (None, ("ContextIdentifier", "ContextType")),
    "IFCGEOMETRICREPRESENTATIONCONTEXT": ("IFCREPRESENTATIONCONTEXT", ("CoordinateSpaceDimension", "Precision", "WorldCoordinateSystem", "TrueNorth")),
    "IFCGEOMETRICREPRESENTATIONSUBCONTEXT": ("IFCGEOMETRICREPRESENTATIONCONTEXT", ("ParentContext", "TargetScale", "TargetView", "UserDefinedTargetView")),
    "IFCREPRESENTATION": (None, ("ContextOfItems", "RepresentationIdentifier", "RepresentationType", "Items")),
    "IFCSHAPEMODEL": ("IFCREPRESENTATION", ()),
    "IFCSHAPEREPRESENTATION": ("IFCSHAPEMODEL", ()),
    "IFCPRODUCTREPRESENTATION": (None, ("Name", "Description", "Representations")),
    "IFCPRODUCTDEFINITIONSHAPE": ("IFCPRODUCTREPRESENTATION", ()),
    "IFCSOLIDMODEL": ("IFCGEOMETRICREPRESENTATIONITEM", ()),
    "IFCSWEPTAREASOLID": ("IFCSOLIDMODEL", ("SweptArea", "Position")),
    "IFCEXTRUDEDAREASOLID": ("IFCSWEPTAREASOLID", ("ExtrudedDirection", "Depth")),
    "IFCPROFILEDEF": (None, ("ProfileType", "ProfileName")),
    "IFCPARAMETERIZEDPROFILEDEF": ("IFCPROFILEDEF", ("Position",)),
    "IFCRECTANGLEPROFILEDEF": ("IFCPARAMETERIZEDPROFILEDEF", ("XDim", "YDim")),
    "IFCARBITRARYCLOSEDPROFILEDEF": ("IFCPROFILEDEF", ("OuterCurve",)),
    "IFCCURVE": ("IFCGEOMETRICREPRESENTATIONITEM", ()),
    "IFCBOUNDEDCURVE": ("IFCCURVE", ()),
    "IFCPOLYLINE": ("IFCBOUNDEDCURVE", ("Points",)),
    # units and materials
    "IFCNAMEDUNIT": (None, ("Dimensions", "UnitType")),
    "IFCSIUNIT": ("IFCNAMEDUNIT", ("Prefix", "Name")),
    "IFCUNITASSIGNMENT": (None, ("Units",)),
    "IFCMATERIAL": (None, ("Name", "Description", "Category")),
}


def known(type_name: str) -> bool:
    return type_name.upper() in CLASSES


@lru_cache(maxsize=None)
def attr_names(type_name: str) -> tuple[str, ...] | None:
    """Full ordered attribute list (inherited first), or None if unknown."""
    name = type_name.upper()
    if name not in CLASSES:
        return None
    parent, direct = CLASSES[name]
    inherited = attr_names(parent) if parent else ()
    return tuple(inherited or ()) + direct


@lru_cache(maxsize=None)
def ancestors(type_name: str) -> tuple[str, ...]:
    """Ancestor chain from the class itself up to its root."""
    name = type_name.upper()
    chain = []
    while name is not None and name in CLASSES:
        chain.append(name)
        name = CLASSES[name][0]  # type: ignore[assignment]
    return tuple(chain)


def is_rooted(type_name: str) -> bool:
    return "IFCROOT" in ancestors(type_name)


def is_subtype(type_name: str, of: str) -> bool:
    return of.upper() in ancestors(type_name)


@lru_cache(maxsize=None)
def subtype_closure(type_name: str) -> frozenset[str]:
    """The class plus every known subclass, all uppercase."""
    wanted = type_name.upper()
    return frozenset(name for name in CLASSES if wanted in ancestors(name)) or frozenset({wanted})


def attr_index(type_name: str, attr_name: str) -> int | None:
    names = attr_names(type_name)
    if names is None:
        return None
    try:
        return names.index(attr_name)
    except ValueError:
        return None
