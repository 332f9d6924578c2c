from setuptools import setup, find_packages

setup(
    name="two-body-qsl",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy~=1.24",
        "scipy~=1.10",
        "schema~=0.7.5",
        "typeguard>=4,<5",
        "click~=8.1.3",
    ],
    entry_points={
        "console_scripts": [
            "two-body-qsl=two_body_qsl.__main__:main",
        ],
    },
    description="minimal generation times of entangled states under two-body hamiltonians",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[],
)
