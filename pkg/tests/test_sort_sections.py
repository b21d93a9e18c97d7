from snrgsim.sort_sections import sort_sections, unsorted_files

a = """\
a

b
    # SORTING_START
    T2star_FID = "Ramsey measurement"
    b_OU = "fit to the Rabi decay"
    # SORTING_END

c:
    d

    # SORTING_START
"""

b = """\
    eps_ns = Alias(en="Duration of one DD pulse", unit="ns")
"""


c = """\
    theta_pi = Alias(en="Gate rotation angle", unit="pi")
"""

d = """\
    # SORTING_END

e
"""


def test_sort_sections():
    expected = a.replace(
        '    T2star_FID = "Ramsey measurement"\n    b_OU = "fit to the Rabi decay"\n',
        '    b_OU = "fit to the Rabi decay"\n    T2star_FID = "Ramsey measurement"\n',
    )
    assert expected + b + c + d == sort_sections(a + c + b + d)


def test_shipped_tables_are_sorted():
    assert unsorted_files() == []
